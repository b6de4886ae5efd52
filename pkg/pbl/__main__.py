from pbl.main import main

main()
