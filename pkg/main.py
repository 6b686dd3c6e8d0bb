"""
VisNet entry point
Same commands as the installed `visnet` script: python main.py analyze ...
"""

from visnet.cli import cli


if __name__ == "__main__":
    cli()
