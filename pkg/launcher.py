"""Launcher for the command line tool when running as a standalone executable."""

import sys
from pathlib import Path


def main():
    """Run the CLI; without arguments the full report on the bundled exemplar is produced."""
    # Get the directory where the executable is located
    app_dir = Path(getattr(sys, "_MEIPASS", "")) if getattr(sys, "frozen", False) else Path(__file__).parent
    sys.path.insert(0, str(app_dir))

    from app import main as cli_main

    argv = sys.argv[1:] or ["report", "--bundle", str(app_dir / "bundle_exemplar.json")]
    sys.exit(cli_main(argv))


if __name__ == "__main__":
    main()
