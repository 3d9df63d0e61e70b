from kepoly.cli import main

main()
