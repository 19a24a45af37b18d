#!/usr/bin/env python3
from src.cmd import cli

if __name__ == "__main__":
    cli()
