from fnploc.cli import main

main()
