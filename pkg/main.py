import sys

from modcomp.cli import main as cli_main


def main(argv=None):
    """
    Entry point when running from a source checkout: python main.py --fan blp2 --beta 2,2
    """
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
