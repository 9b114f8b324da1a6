"""Physical constants shared across the simulator (km / s units)."""

EARTH_RADIUS_KM = 6371.0

# Gravitational parameter of Earth, km^3/s^2.
MU_KM3_S2 = 398600.4418

# Vacuum light speed, km/s.
LIGHT_SPEED_KM_S = 299792.458

# Earth sidereal rotation rate, rad/s.
SIDEREAL_RATE_RAD_S = 7.2921150e-5
