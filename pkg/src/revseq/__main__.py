from revseq.cli import main

main()
