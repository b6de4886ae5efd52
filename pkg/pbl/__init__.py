"""
PBL (Pullback Bifurcation Lab)
스칼라 비자율 Stratonovich SDE의 경로별 랜덤 분기 실험실
"""
__version__ = "1.0.0"
