from kg1d.cli import main

main()
