"""Quadratic separating surfaces and their margin geometry.

A classifier here is the sign of h(x) = 0.5 x'Wx + b'x + c.  This script
builds a few surfaces by hand, evaluates decision values and margins, and
shows how the packed parameter vector theta = (wtri, b, c) relates to the
matrix form.
"""

import numpy as np

from quadsurf import (Dataset, SurfaceParams, build_design, margins, predict,
                      smooth_value, total_loss)

# A unit-circle boundary: h(x) = 0.5|x|^2 - 1, positive outside radius sqrt(2)
circle = SurfaceParams(wtri=np.array([1.0, 1.0, 0.0]), b=np.zeros(2), c=-1.0)
print("W =\n", circle.matrix())
print("h at (2,0), (0,0):", circle.decision_values(np.array([[2.0, 0.0], [0.0, 0.0]])))
print("labels:", predict(circle, [2.0, 0.0]), predict(circle, [0.0, 0.0]))

# Margins F_i = 1 - y_i h(x_i) say how far each sample is from the unit margin:
# F_i <= 0 means comfortably classified, F_i > 0 counts toward the 0-1 loss.
pts = np.array([[2.0, 0.0], [0.0, 0.1], [1.0, 1.0], [0.2, -0.1]])
labels = np.array([1.0, -1.0, 1.0, -1.0])
data = Dataset(points=pts, labels=labels)
cache = build_design(data)

print("\nmargin rows a_i (gradient of F_i):\n", cache.a)
print("margins at the circle surface:", margins(circle, cache))

# The smooth regularizer f = sum 0.5||Wx_i + b||^2 is a quadratic form with
# constant Hessian G; the c row/column is identically zero.
print("\nsmooth value:", smooth_value(circle, cache))
print("G (note the zero last row/column):\n", cache.G.round(3))

lv = total_loss(circle, cache, lam=5.0)
print(f"\ntotal loss with lam=5: smooth={lv.smooth:.3f} violations={lv.count} "
      f"total={lv.total:.3f}")
