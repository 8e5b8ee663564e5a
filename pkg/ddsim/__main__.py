from ddsim.main import main

main()
