"""Physical constants and the experiment's reported parameters."""

import math

C = 299_792_458.0  # m/s, exact
OMEGA_EARTH = 7.2921159e-5  # rad/s, sidereal rotation rate

SPHERE_RADIUS_M = 6_371_000.0
WGS84_A_M = 6_378_137.0
WGS84_F = 1.0 / 298.257223563

# Reported experiment parameters.
SITE_A_DMS = ((36, 33, 15.31), (100, 28, 24.66))
SITE_B_DMS = ((36, 33, 15.31), (100, 38, 42.00))
SOURCE_DMS = ((36, 32, 25.22), (100, 33, 33.30))
DEFAULT_SITE_ALTITUDE_M = 3200.0

PAIR_COINCIDENCE_RATE_HZ = 550e3
COINCIDENCE_WINDOW_S = 3e-9
VISIBILITY = 0.913
AB_TIMING_UNCERTAINTY_S = 350e-12
SYNC_RATE_HZ = 5e3
BASELINE_FOR_RHO_M = 15.35e3
BASELINE_STATED_M = 15.3e3
RHO = 6.84e-6
INTERVAL_T_S = 1800.0
RUN_DURATION_S = 12 * 3600.0
BETA_CMB = 1e-3

DIAGRAM_HALF_BASELINE_M = 7.8e3
DIAGRAM_SETTING_TIME_S = 23.1e-6
DIAGRAM_MEASUREMENT_TIME_S = 26.1e-6

TSIRELSON = 2.0 * math.sqrt(2.0)
