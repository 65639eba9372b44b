"""Allow running the command line with python -m matchedcavity."""

from .cli import main

raise SystemExit(main())
