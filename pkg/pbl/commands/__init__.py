"""
Commands package
"""
from pbl.commands import attractor, integrate, recurrence, selftest, sweep, verify

COMMANDS = {
    "pitchfork-sweep": sweep.run_pitchfork,
    "transcritical-sweep": sweep.run_transcritical,
    "verify-cocycle": verify.run,
    "attractor": attractor.run,
    "recurrence": recurrence.run,
    "integrate": integrate.run,
    "selftest": selftest.run,
}

__all__ = ["COMMANDS", "attractor", "integrate", "recurrence", "selftest", "sweep", "verify"]
