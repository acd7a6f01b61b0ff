"""Bit-pattern census of n^p for p = 2 and 4, plus a check of the odd-bit characterization."""
import sys

from phi4lat import lcu

if __name__ == "__main__":
    n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 127
    for power in (2, 4):
        print(f"power {power}, n <= {n_max}")
        print(lcu.census_csv(power, n_max))
    print("characterization holds up to 4096:", all(lcu.binpattern_holds(p, 4096) for p in (2, 4)))
