import numpy as np

SIGNAL_EMISSION = np.array(
    [
        [0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0],
        [0.5, 0.5, 0.5, 0.5, 0.5, 0.0, 0.0],
        [0.5, 0.5, 0.5, 0.0, 0.5, 0.0, 0.0],
        [0.5, 0.5, 0.5, 0.0, 0.0, 0.5, 0.0],
        [0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.5],
    ]
)
SIGNAL_TRANSITION = np.array(
    [
        [0.7, 0.3, 0.0, 0.0, 0.0],
        [0.5, 0.25, 0.25, 0.0, 0.0],
        [0.0, 0.25, 0.5, 0.25, 0.0],
        [0.0, 0.0, 0.25, 0.25, 0.5],
        [0.0, 0.0, 0.0, 0.5, 0.5],
    ]
)
NOISE_EMISSION = np.array(
    [
        [0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.5],
    ]
)
NOISE_TRANSITION = np.full((5, 5), 0.2)

# parabola: label 1 above y = 5 (x - 0.5)^2 + 0.4
PARABOLA_SIZE = 500
PARABOLA_BAND = 0.1
PARABOLA_FLIP = 0.10

SIGNAL_NOISE_SEQUENCES = 100
SIGNAL_NOISE_STEPS = 50

# five rectangles of width 1 and height 0.5 along x in [0, 5]
RECTANGLE_CENTERS = (0.4, 0.4, 0.4, 0.6, 0.6)
RECTANGLE_HALF_HEIGHT = 0.25
RECTANGLES_SIZE = 250
RECTANGLES_FLIP = 0.05
RECTANGLES_GRID = 100

TWO_REGION_SIZE = 500
TEST_FRACTION = 0.3

KMEANS_MAX_ITER = 300
KMEANS_TOLERANCE = 1e-8
