"""Entry point for running the toolkit with `python -m steerkit`."""
from steerkit.cli import cli


def main():
    """Run the command-line interface."""
    cli(obj={})


if __name__ == '__main__':
    main()
