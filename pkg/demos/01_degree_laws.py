"""Degree laws, their moments and the size-biased law."""

from gwising.degree_model import (
    DegreeDistribution,
    b_alpha,
    b_alpha_diagnostic,
    mean_degree,
    second_moment,
    size_biased,
    validate,
    xlogx_moment,
)

p = DegreeDistribution.parse("2:0.5,3:0.5")
print("valid:", validate(p).ok)
print("a =", mean_degree(p), " <k^2> =", second_moment(p), " b =", round(xlogx_moment(p), 5))
print("size-biased:", size_biased(p).as_dict())
print("b_alpha(s=2, alpha=0.5) =", b_alpha(p, 2, 0.5))

# a law that breaks the hypotheses is reported, not silently accepted
print(validate(DegreeDistribution.from_dict({2: 1.0})).violation)

# heavy tail: b_alpha is finite only for alpha < lambda - 2
for alpha in (0.4, 0.6):
    diag = b_alpha_diagnostic(2.5, 3, alpha)
    print(f"lambda=2.5 alpha={alpha}: {diag.verdict}  values at {diag.cutoffs}: {[round(v, 4) for v in diag.values]}")
