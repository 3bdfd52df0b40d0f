"""How fast do the exact critical equations grow?

The head-eliminated loss on one activation region is a rational function
whose derivative numerators explode combinatorially with the hidden width L
and the sample count n.  This script builds them for a small dataset at
several (n, L) and reports term counts, total degrees, and the largest
coefficient magnitude -- the reason the enumeration needs exact arithmetic
and region-level parallelism rather than floating point.

Run:  python demos/symbolic_scaling.py
"""

from reluminima.poly import GREVLEX
from reluminima.surrogate import Dataset, IndicatorMatrix, build_surrogate

X = ["1/5", "2/5", "3/5", "4/5", "1"]
Y = ["1", "0", "1", "1", "0"]

# one activation-sign column per unit, truncated to the first n samples
COLUMNS = ["++--+", "+--+-", "--++-"]


def pattern(n, L):
    rows = ["".join(COLUMNS[ell][i] for ell in range(L)) for i in range(n)]
    return "".join(rows)


def main():
    print(f"{'n':>3} {'L':>3} {'params':>7} {'terms':>7} {'degree':>7} "
          f"{'max |coeff| digits':>19}")
    for L in (1, 2, 3):
        for n in (2, 3, 4, 5):
            ds = Dataset([[v] for v in X[:n]], Y[:n], "1/10", L,
                         center=False)
            E = IndicatorMatrix.from_pattern(pattern(n, L), n, L)
            s = build_surrogate(ds, E)
            num = s.derivatives["b_11"][0].primitive(GREVLEX)
            degree = max(sum(m) for m in num.terms)
            digits = max(len(str(abs(int(c.numerator))))
                         for c in num.terms.values())
            print(f"{n:>3} {L:>3} {ds.width:>7} {len(num.terms):>7} "
                  f"{degree:>7} {digits:>19}")
    print("\nterm counts grow by orders of magnitude with each extra unit; "
          "the full enumeration multiplies this by 2^(nL) regions.")


if __name__ == "__main__":
    main()
