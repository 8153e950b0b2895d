#!/usr/bin/env python3
"""Regenerate the shared preset path files under src/ferrosim/data/paths/.

The files are committed; the test suite asserts they byte-match a fresh
regeneration, so run this after touching path geometry.
"""

from ferrosim.paths import write_preset_files


def main() -> None:
    for file in write_preset_files():
        print(file)


if __name__ == "__main__":
    main()
