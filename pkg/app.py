import sys

from src.cli.main import main as cli_main


def main():
    """Function to run the command-line lab."""
    sys.exit(cli_main())


if __name__ == '__main__':
    main()
