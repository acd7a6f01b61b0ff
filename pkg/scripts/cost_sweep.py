"""T-count of every algorithm versus the field cutoff k, written to out/sweep_k.*."""
import sys

from phi4lat import cli

if __name__ == "__main__":
    sys.exit(cli.main(["cost-sweep", "--axis", "k", "--range", "4:256:7log",
                       "--conjecture-iiib", "--out", "out/sweep"] + sys.argv[1:]))
