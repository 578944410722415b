#!/usr/bin/env python3
"""Generate the solar position oracle table used by the core test suite.

Reference algorithm: PSA+ (Blanco-Muriel et al. 2001, with the 2020
coefficient update fitted for 2020-2050). This is an ephemeris-fit algorithm
with a stated accuracy of ~0.01 degrees, independent of the fractional-year /
equation-of-time formulation used by the library, so it can serve as an
oracle for altitude/azimuth tolerances of 0.3/0.5 degrees.

Azimuth convention: 0 = north, clockwise, degrees in [0, 360).
Altitude: geometric (no refraction).
Sunrise: first upward crossing of altitude = -0.833 deg within the local day,
found by scanning + bisection.

Writes crates/core/tests/fixtures/solar_oracle.csv with columns:
  lat,lon,alt_m,date,time,utc_offset_min,exp_altitude_deg,exp_azimuth_deg,exp_sunrise_local_min
"""

import math
import os

RAD = math.pi / 180.0
EARTH_MEAN_RADIUS = 6371.01  # km
ASTRONOMICAL_UNIT = 149597890.0  # km


def _tdiv(a, b):
    """Integer division truncating toward zero (C semantics); the JD
    formula below is written for it, and Python's // floors instead."""
    return int(a / b)


def julian_day(year, month, day, hours_utc):
    aux1 = _tdiv(month - 14, 12)
    aux2 = _tdiv(1461 * (year + 4800 + aux1), 4) + _tdiv(367 * (month - 2 - 12 * aux1), 12) \
        - _tdiv(3 * _tdiv(year + 4900 + aux1, 100), 4) + day - 32075
    return aux2 - 0.5 + hours_utc / 24.0


def psa_position(year, month, day, hours_utc, lat_deg, lon_deg):
    """PSA+ sun position. Returns (altitude_deg geometric, azimuth_deg from N cw)."""
    jd = julian_day(year, month, day, hours_utc)
    elapsed = jd - 2451545.0

    # PSA+ (2020) ecliptic coordinates
    omega = 2.267127827 - 9.300339267e-4 * elapsed
    mean_longitude = 4.895036035 + 1.720279602e-2 * elapsed
    mean_anomaly = 6.239468336 + 1.720200135e-2 * elapsed
    ecliptic_longitude = (mean_longitude
                          + 3.338320972e-2 * math.sin(mean_anomaly)
                          + 3.497596876e-4 * math.sin(2.0 * mean_anomaly)
                          - 1.544353226e-4
                          - 8.689729360e-6 * math.sin(omega))
    ecliptic_obliquity = 4.090904909e-1 - 6.213605399e-9 * elapsed \
        + 4.418094944e-5 * math.cos(omega)

    # Celestial coordinates
    sin_el = math.sin(ecliptic_longitude)
    dy = math.cos(ecliptic_obliquity) * sin_el
    dx = math.cos(ecliptic_longitude)
    right_ascension = math.atan2(dy, dx)
    if right_ascension < 0.0:
        right_ascension += 2.0 * math.pi
    declination = math.asin(math.sin(ecliptic_obliquity) * sin_el)

    # Local coordinates
    gmst = 6.697096103 + 6.570984737e-2 * elapsed + hours_utc
    lmst = (gmst * 15.0 + lon_deg) * RAD
    hour_angle = lmst - right_ascension
    lat = lat_deg * RAD

    cos_lat = math.cos(lat)
    sin_lat = math.sin(lat)
    cos_ha = math.cos(hour_angle)
    zenith = math.acos(cos_lat * cos_ha * math.cos(declination)
                       + math.sin(declination) * sin_lat)
    dy2 = -math.sin(hour_angle)
    dx2 = math.tan(declination) * cos_lat - sin_lat * cos_ha
    azimuth = math.atan2(dy2, dx2)
    if azimuth < 0.0:
        azimuth += 2.0 * math.pi

    # Parallax correction to zenith
    parallax = (EARTH_MEAN_RADIUS / ASTRONOMICAL_UNIT) * math.sin(zenith)
    zenith += parallax

    return 90.0 - zenith / RAD, azimuth / RAD


def altitude_local(year, month, day, local_min, utc_offset_min, lat, lon):
    hours_utc = (local_min - utc_offset_min) / 60.0
    alt, _ = psa_position(year, month, day, hours_utc, lat, lon)
    return alt


def sunrise_local_min(year, month, day, utc_offset_min, lat, lon):
    """First upward crossing of altitude = -0.833 deg within the local day,
    in local clock minutes. None if no crossing (polar day/night)."""
    target = -0.833
    prev = altitude_local(year, month, day, 0.0, utc_offset_min, lat, lon) - target
    step = 2.0
    t = step
    while t <= 24.0 * 60.0:
        cur = altitude_local(year, month, day, t, utc_offset_min, lat, lon) - target
        if prev < 0.0 <= cur:
            lo, hi = t - step, t
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if altitude_local(year, month, day, mid, utc_offset_min, lat, lon) - target < 0.0:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        prev = cur
        t += step
    return None


LOCATIONS = [
    # (name, lat, lon, alt_m, utc_offset_min)
    ("tempe_az", 33.4255, -111.9400, 360.0, -420),
    ("singapore", 1.3521, 103.8198, 15.0, 480),
    ("sydney", -33.8688, 151.2093, 58.0, 600),
    ("reykjavik", 64.1466, -21.9426, 61.0, 0),
    ("quito", -0.1807, -78.4678, 2850.0, -300),
    ("berlin", 52.5200, 13.4050, 34.0, 60),
    ("cape_town", -33.9249, 18.4241, 25.0, 120),
    ("denver", 39.7392, -104.9903, 1609.0, -420),
]

DATES = [
    (2001, 3, 20),
    (2005, 6, 21),
    (2010, 9, 23),
    (2018, 6, 21),
    (2049, 12, 21),
]

TIMES = ["06:30", "09:45", "12:00", "15:20", "18:10"]

# The azimuth coordinate is ill-conditioned near the zenith (error scales with
# 1/cos(altitude)), so for sites where the sun passes close to overhead the
# near-noon sample is shifted off transit to keep all table rows below ~78 deg.
TIME_OVERRIDES = {
    "quito": ["06:30", "09:45", "14:10", "16:20", "18:10"],
    "singapore": ["06:30", "09:45", "15:00", "16:20", "18:10"],
    "sydney": ["06:30", "09:45", "14:30", "16:20", "18:10"],
    "tempe_az": ["06:30", "09:45", "13:40", "15:20", "18:10"],
}


def main():
    out_path = os.path.join(os.path.dirname(__file__), "..",
                            "crates", "core", "tests", "fixtures", "solar_oracle.csv")
    rows = []
    max_alt = -90.0
    for (name, lat, lon, alt_m, off) in LOCATIONS:
        times = TIME_OVERRIDES.get(name, TIMES)
        for (y, m, d) in DATES:
            sr = sunrise_local_min(y, m, d, off, lat, lon)
            for hhmm in times:
                hh, mm = [int(x) for x in hhmm.split(":")]
                local_min = hh * 60.0 + mm
                hours_utc = (local_min - off) / 60.0
                alt, az = psa_position(y, m, d, hours_utc, lat, lon)
                max_alt = max(max_alt, alt)
                rows.append((lat, lon, alt_m, f"{y:04d}-{m:02d}-{d:02d}", hhmm + ":00",
                             off, alt, az, "" if sr is None else f"{sr:.4f}"))
    with open(out_path, "w") as f:
        f.write("lat,lon,alt_m,date,time,utc_offset_min,"
                "exp_altitude_deg,exp_azimuth_deg,exp_sunrise_local_min\n")
        for r in rows:
            f.write(f"{r[0]},{r[1]},{r[2]},{r[3]},{r[4]},{r[5]},"
                    f"{r[6]:.6f},{r[7]:.6f},{r[8]}\n")
    print(f"wrote {len(rows)} rows to {os.path.normpath(out_path)} (max altitude {max_alt:.2f})")

    # Anchors (cross-check against the published NOAA calculator):
    # Tempe AZ 2018-06-21 solar noon ~12:28 MST -> altitude ~80.0, azimuth ~180
    alt, az = psa_position(2018, 6, 21, (12 * 60 + 28 + 420) / 60.0, 33.4255, -111.94)
    sr = sunrise_local_min(2018, 6, 21, -420, 33.4255, -111.94)
    print(f"anchor tempe noon: alt={alt:.3f} az={az:.3f} sunrise_local={sr / 60.0:.3f} h")


if __name__ == "__main__":
    main()
