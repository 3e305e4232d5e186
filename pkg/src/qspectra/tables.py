"""Published benchmark values for the sextic and quartic-sextic oscillators.

Keys are (mu, eta) for V = mu x^2 + eta x^6. Each block lists, per level
n = 0..3, the hierarchy values at orders 4, 8 and 12 and the exact value.
"""

TABLE1_ORDERS = (4, 8, 12)

TABLE1 = {
    (1.0, 0.1): (
        (1.104923, 1.109628, 1.109070, 1.109087),
        (3.576125, 3.598684, 3.595729, 3.596037),
        (6.609983, 6.662450, 6.655648, 6.644392),
        (10.391040, 10.483375, 10.472339, 10.237874),
    ),
    (1.0, 1.0): (
        (1.418059, 1.442229, 1.435465, 1.435625),
        (4.971886, 5.051659, 5.034736, 5.033396),
        (9.831164, 9.974381, 9.958135, 9.966622),
        (16.219169, 16.435265, 16.391053, 15.989441),
    ),
    (1.0, 10.0): (
        (2.174017, 2.221521, 2.205998, 2.205723),
        (8.002447, 8.156497, 8.110650, 8.114843),
        (16.353667, 16.624921, 16.587359, 16.641218),
        (27.537122, 27.940075, 27.843302, 27.155086),
    ),
    (1.0, 100.0): (
        (3.665363, 3.745295, 3.718101, 3.716975),
        (13.751708, 14.023562, 13.966820, 13.946207),
        (28.440597, 28.925950, 28.863060, 28.977294),
        (48.230105, 48.952973, 48.770486, 47.564985),
    ),
    (1.0, 1000.0): (
        (6.404635, 6.542058, 6.487758, 6.492350),
        (24.184202, 24.664085, 24.557556, 24.525316),
        (50.214147, 51.077401, 50.968447, 51.182480),
        (85.350546, 86.638619, 86.308303, 84.175584),
    ),
    (0.0, 1.0): (
        (1.129584, 1.153559, 1.143340, 1.144802),
        (4.278386, 4.363353, 4.340883, 4.338599),
        (8.899753, 9.053228, 9.034111, 9.073085),
        (15.143475, 15.372717, 15.313502, 14.935169),
    ),
}

TABLE1_METHOD_TOL = 5e-6
TABLE1_EXACT_TOL = 1e-4

# V = 30 x^2 + 20 sqrt(30) x^4 + 100 x^6
TABLE2_POTENTIAL = (30.0, 109.544511501, 100.0)
TABLE2_PRESENT = (7.3569, 24.6462, 46.3585, 73.0669)
TABLE2_HILL = (7.3569, 24.6462, 46.3355, 71.3534)
TABLE2_SWKB = (7.3786, 24.6861, 46.3690, 71.3823)
TABLE2_PRESENT_TOL = 5e-4
TABLE2_HILL_TOL = 5e-3
# orders searched for the minimal-oscillation estimate
TABLE2_N_MAX = 14
