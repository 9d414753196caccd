#!/usr/bin/env python3
"""
Loop TAD 파이프라인 런처
`entry.main` 에 위임합니다.
"""

import sys

from entry.main import main


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
