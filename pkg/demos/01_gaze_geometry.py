"""Where on the screen plane is this person looking?

The gaze tracker reports a 3-D pupil position and a gaze direction per
frame. With the camera at the origin and the screen in the Z=0 plane, the
ray p + D*t crosses the plane at t = -z_p / z_d. This demo walks through
the three ray regimes and shows the scale invariance of the result.
"""

import numpy as np

from adwatch.geometry import intersect_gaze

print("A viewer sits 60 cm from the screen, pupil at (0, 0, 60).")
print()

cases = [
    ("straight at the camera", (0, 0, 60), (0.0, 0.0, -1.0)),
    ("glancing right and up", (0, 0, 60), (0.25, 0.12, -1.0)),
    ("looking over the screen", (0, 0, 60), (0.0, 0.9, -0.3)),
    ("gaze away from the screen", (0, 0, 60), (0.1, 0.0, 0.5)),
    ("gaze parallel to the plane", (0, 0, 60), (1.0, 0.0, 0.0)),
]

for label, pupil, direction in cases:
    hit = intersect_gaze(pupil, direction)
    if hit.status.value == "parallel":
        where = "never meets the plane"
    else:
        where = f"({hit.point.x_s:7.2f}, {hit.point.y_s:7.2f}) cm, t = {hit.t:8.2f}"
    print(f"  {label:28s} -> {hit.status.value:16s} {where}")

print()
print("The tracker's direction vector has arbitrary length; scaling it")
print("changes t but never the on-plane point:")
pupil, direction = (3.0, -1.0, 55.0), np.array([0.2, 0.1, -1.0])
for lam in (1.0, 0.001, 250.0):
    hit = intersect_gaze(pupil, direction * lam)
    print(
        f"  |D| scaled by {lam:8.3f}: point ({hit.point.x_s:.6f}, {hit.point.y_s:.6f}),"
        f" t = {hit.t:12.4f}"
    )
