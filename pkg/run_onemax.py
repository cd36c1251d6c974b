#!/usr/bin/env python3
"""
Launch script for the OneMax mutation-policy toolkit
Checks the package imports, then hands the arguments to the command-line front end
"""

import sys
from pathlib import Path


def check_system():
    """Import the core modules before running a command"""
    try:
        from modules.kernel import hypergeometric_transition  # noqa: F401
        from modules.policy import k_opt_table  # noqa: F401
        return True
    except ImportError as e:
        print(f"❌ Core modules failed to import: {e}")
        print("💡 Try running: pip3 install -r requirements.txt")
        return False


def main():
    # Run from the repository root so relative cache/results paths land here
    sys.path.insert(0, str(Path(__file__).parent))
    if not check_system():
        return 1

    from modules.cli import main as cli_main
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
