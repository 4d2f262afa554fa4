from reqlens.cli import main

main()
