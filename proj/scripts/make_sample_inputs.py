#!/usr/bin/env python3
"""Generate the synthetic sample inputs shipped in data/sample/.

The layers are synthetic but shaped like the Addis Ababa case: a ~540 km2
boundary, 5.54 M residents, 1845 workplaces and 3633 POIs, plus a synthetic
hourly weather year and a synthetic national load curve. Everything is
deterministic for a given --seed.

    python3 scripts/make_sample_inputs.py --out data/sample
"""

import argparse
import csv
import json
import math
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

EARTH_RADIUS_KM = 6371.0088
CENTER = (38.76, 9.01)  # lon, lat
AREA_KM2 = 540.0
POPULATION = 5.54e6
N_WORKPLACES = 1845
N_POIS = 3633
RASTER_CELL_DEG = 0.005

# Spatial structure, tuned so the gravity model gives ~17.4 km two-way.
POP_SCALE_KM = 10.0
POP_CORE_DIP_KM = 2.5
JOB_CORE_SD_KM = 1.3
JOB_CORE_FRACTION = 0.78
POI_CORE_SD_KM = 2.2
POI_CORE_FRACTION = 0.75
CBD_OFFSET_KM = (-0.8, 0.6)


def km_per_deg():
    ky = EARTH_RADIUS_KM * math.pi / 180.0
    kx = ky * math.cos(math.radians(CENTER[1]))
    return kx, ky


def to_lonlat(x, y):
    kx, ky = km_per_deg()
    return CENTER[0] + x / kx, CENTER[1] + y / ky


def to_xy(lon, lat):
    kx, ky = km_per_deg()
    return (lon - CENTER[0]) * kx, (lat - CENTER[1]) * ky


def boundary_ring_km(n=96):
    theta = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    shape = 1.0 + 0.16 * np.sin(2 * theta + 0.5) + 0.07 * np.cos(3 * theta) + 0.04 * np.sin(5 * theta + 1.0)
    # shoelace area of r(theta) polygon with unit scale
    x0, y0 = shape * np.cos(theta), shape * np.sin(theta)
    unit_area = 0.5 * abs(np.dot(x0, np.roll(y0, -1)) - np.dot(y0, np.roll(x0, -1)))
    scale = math.sqrt(AREA_KM2 / unit_area)
    return x0 * scale, y0 * scale


def inside(px, py, rx, ry):
    n = len(rx)
    result = np.zeros(px.shape, dtype=bool)
    j = n - 1
    for i in range(n):
        xi, yi, xj, yj = rx[i], ry[i], rx[j], ry[j]
        crosses = ((yi > py) != (yj > py))
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = (xj - xi) * (py - yi) / (yj - yi) + xi
        result ^= crosses & (px < xint)
        j = i
    return result


def sample_points(rng, n, core_sd, core_fraction, rx, ry):
    out = []
    while len(out) < n:
        if rng.random() < core_fraction:
            x = rng.normal(CBD_OFFSET_KM[0], core_sd)
            y = rng.normal(CBD_OFFSET_KM[1], core_sd)
        else:
            x = rng.uniform(rx.min(), rx.max())
            y = rng.uniform(ry.min(), ry.max())
        if inside(np.array([x]), np.array([y]), rx, ry)[0]:
            out.append((x, y))
    return np.array(out)


def population_raster(rng, rx, ry):
    lon_min, lat_min = to_lonlat(rx.min() - 1.0, ry.min() - 1.0)
    lon_max, lat_max = to_lonlat(rx.max() + 1.0, ry.max() + 1.0)
    xll = math.floor(lon_min / RASTER_CELL_DEG) * RASTER_CELL_DEG
    yll = math.floor(lat_min / RASTER_CELL_DEG) * RASTER_CELL_DEG
    ncols = int(math.ceil((lon_max - xll) / RASTER_CELL_DEG))
    nrows = int(math.ceil((lat_max - yll) / RASTER_CELL_DEG))
    lons = xll + (np.arange(ncols) + 0.5) * RASTER_CELL_DEG
    lats = yll + (nrows - np.arange(nrows) - 0.5) * RASTER_CELL_DEG  # north to south
    glon, glat = np.meshgrid(lons, lats)
    gx, gy = to_xy(glon, glat)
    r = np.hypot(gx - CBD_OFFSET_KM[0], gy - CBD_OFFSET_KM[1])
    density = np.exp(-r / POP_SCALE_KM) * (1.0 - 0.55 * np.exp(-(r / POP_CORE_DIP_KM) ** 2))
    density *= rng.lognormal(0.0, 0.35, density.shape)
    mask = inside(gx.ravel(), gy.ravel(), rx, ry).reshape(gx.shape)
    density = np.where(mask, density, 0.0)
    counts = density / density.sum() * POPULATION
    return xll, yll, ncols, nrows, counts, gx, gy


def gravity_mean_two_way(rx, ry, pop_xy, pop_w, jobs, cell=1.95, circuity=1.3):
    """Python mirror of the C++ pipeline, used only to tune the layer shapes."""
    w = rx.max() - rx.min()
    h = ry.max() - ry.min()
    ncols, nrows = int(math.ceil(w / cell - 1e-9)), int(math.ceil(h / cell - 1e-9))
    cx0 = 0.5 * (rx.max() + rx.min()) - 0.5 * ncols * cell
    cy0 = 0.5 * (ry.max() + ry.min()) - 0.5 * nrows * cell
    cols, rows = np.meshgrid(np.arange(ncols), np.arange(nrows))
    ccx = cx0 + (cols.ravel() + 0.5) * cell
    ccy = cy0 + (rows.ravel() + 0.5) * cell
    keep = inside(ccx, ccy, rx, ry)
    index = -np.ones(nrows * ncols, dtype=int)
    index[keep] = np.arange(keep.sum())
    zx, zy = ccx[keep], ccy[keep]

    def locate(px, py):
        c = np.floor((px - cx0) / cell).astype(int)
        r_ = np.floor((py - cy0) / cell).astype(int)
        ok = (c >= 0) & (c < ncols) & (r_ >= 0) & (r_ < nrows)
        z = -np.ones(px.shape, dtype=int)
        z[ok] = index[r_[ok] * ncols + c[ok]]
        return z

    nz = len(zx)
    P = np.bincount(locate(*pop_xy)[locate(*pop_xy) >= 0], weights=pop_w[locate(*pop_xy) >= 0], minlength=nz)
    jz = locate(jobs[:, 0], jobs[:, 1])
    A = np.bincount(jz[jz >= 0], minlength=nz).astype(float)
    d = circuity * np.hypot(zx[:, None] - zx[None, :], zy[:, None] - zy[None, :])
    np.fill_diagonal(d, 0.5 * math.sqrt(cell * cell / math.pi))
    beta = 0.3 * (cell * cell) ** -0.18
    wgt = A[None, :] * np.exp(-beta * d)
    p = wgt / wgt.sum(axis=1, keepdims=True)
    n = P / P.sum()
    off = p * d
    np.fill_diagonal(off, 0.0)
    return 2.0 * float((n[:, None] * off).sum()), nz


def write_boundary(path, rx, ry):
    ring = [list(to_lonlat(x, y)) for x, y in zip(rx, ry)]
    ring.append(ring[0])
    ring = [[round(a, 6), round(b, 6)] for a, b in ring]
    doc = {
        "type": "FeatureCollection",
        "features": [{
            "type": "Feature",
            "properties": {"name": "synthetic study area"},
            "geometry": {"type": "Polygon", "coordinates": [ring]},
        }],
    }
    path.write_text(json.dumps(doc, indent=1) + "\n")


def write_points(path, pts, prefix):
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["lon", "lat", "name"])
        for k, (x, y) in enumerate(pts):
            lon, lat = to_lonlat(x, y)
            w.writerow([f"{lon:.6f}", f"{lat:.6f}", f"{prefix}-{k:04d}"])


def write_asc(path, xll, yll, ncols, nrows, counts):
    with path.open("w") as f:
        f.write(f"ncols {ncols}\nnrows {nrows}\nxllcorner {xll:.6f}\nyllcorner {yll:.6f}\n")
        f.write(f"cellsize {RASTER_CELL_DEG}\nNODATA_value -9999\n")
        for row in counts:
            f.write(" ".join(f"{v:.1f}" if v > 0 else "0" for v in row) + "\n")


def clear_sky(zenith_cos):
    # Haurwitz clear-sky GHI.
    zc = np.maximum(zenith_cos, 1e-6)
    return np.where(zenith_cos > 0, 1098.0 * zc * np.exp(-0.057 / zc), 0.0)


def sun_cos_zenith(t_utc, lat, lon):
    doy = t_utc.timetuple().tm_yday
    hour = t_utc.hour + t_utc.minute / 60.0
    g = 2 * math.pi / 365.0 * (doy - 1 + (hour - 12) / 24)
    decl = (0.006918 - 0.399912 * math.cos(g) + 0.070257 * math.sin(g) - 0.006758 * math.cos(2 * g)
            + 0.000907 * math.sin(2 * g) - 0.002697 * math.cos(3 * g) + 0.00148 * math.sin(3 * g))
    eqt = 229.18 * (0.000075 + 0.001868 * math.cos(g) - 0.032077 * math.sin(g)
                    - 0.014615 * math.cos(2 * g) - 0.040849 * math.sin(2 * g))
    solar_time = hour * 60 + eqt + 4 * lon
    ha = math.radians(solar_time / 4 - 180)
    phi = math.radians(lat)
    return math.sin(phi) * math.sin(decl) + math.cos(phi) * math.cos(decl) * math.cos(ha)


def write_weather(path, rng, year=2020):
    lon, lat = CENTER
    start = datetime(year, 1, 1, 0, 10, tzinfo=timezone.utc)
    hours = 366 * 24 if year % 4 == 0 else 365 * 24
    # daily clearness: dry season clear, Jul-Sep rainy
    days = hours // 24
    day_clear = np.empty(days)
    for d in range(days):
        month = (datetime(year, 1, 1) + timedelta(days=d)).month
        base = {1: 0.86, 2: 0.84, 3: 0.78, 4: 0.74, 5: 0.76, 6: 0.66, 7: 0.50, 8: 0.50, 9: 0.60,
                10: 0.78, 11: 0.86, 12: 0.87}[month]
        day_clear[d] = float(np.clip(base + rng.normal(0, 0.10), 0.15, 0.97))
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["time", "G(h)", "Gb(n)", "Gd(h)", "T2m", "WS10m"])
        for k in range(hours):
            t = start + timedelta(hours=k)
            cz = sun_cos_zenith(t, lat, lon)
            kc = day_clear[k // 24] * float(np.clip(1 + rng.normal(0, 0.08), 0.5, 1.2))
            ghi = float(clear_sky(np.array(cz))) * min(kc, 1.0)
            if ghi <= 0:
                ghi = dni = dhi = 0.0
            else:
                diffuse_frac = float(np.clip(1.0 - 1.1 * (kc - 0.2), 0.12, 1.0))
                dhi = ghi * diffuse_frac
                dni = (ghi - dhi) / max(cz, 0.05)
            local_h = (t.hour + 3) % 24
            temp = 16.0 + 6.0 * math.sin((local_h - 9) / 24 * 2 * math.pi) + rng.normal(0, 0.8)
            wind = max(0.2, 2.0 + rng.normal(0, 0.7))
            w.writerow([t.strftime("%Y-%m-%dT%H:%M:%SZ"), f"{ghi:.1f}", f"{dni:.1f}", f"{dhi:.1f}",
                        f"{temp:.2f}", f"{wind:.2f}"])


def write_national_load(path):
    # Hourly shape of a weekday national curve with an evening peak; scaled to
    # a 4,560 MW peak and the daily energy implied by a 23,198 MWh city share.
    shape = np.array([0.70, 0.67, 0.65, 0.64, 0.65, 0.69, 0.74, 0.77, 0.78, 0.78, 0.79, 0.79,
                      0.78, 0.77, 0.76, 0.75, 0.76, 0.80, 0.92, 1.00, 0.98, 0.92, 0.83, 0.75])
    share = (2100.0 / 4560.0) * (5.54 / 8.88)
    target_energy = 23198.0 / share
    peak = 4560.0
    # keep the peak hour fixed, scale the rest to hit the target energy
    rest = shape.copy()
    rest[19] = 0.0
    k = (target_energy - peak) / (peak * rest.sum())
    mw = peak * shape * k
    mw[19] = peak
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["hour", "mw"])
        for h, v in enumerate(mw):
            w.writerow([h, f"{v:.3f}"])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/sample")
    ap.add_argument("--seed", type=int, default=20200101)
    ap.add_argument("--check", action="store_true", help="print the gravity-model mean distance")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    rx, ry = boundary_ring_km()
    xll, yll, ncols, nrows, counts, gx, gy = population_raster(rng, rx, ry)
    jobs = sample_points(rng, N_WORKPLACES, JOB_CORE_SD_KM, JOB_CORE_FRACTION, rx, ry)
    pois = sample_points(rng, N_POIS, POI_CORE_SD_KM, POI_CORE_FRACTION, rx, ry)

    if args.check:
        m, nz = gravity_mean_two_way(rx, ry, (gx.ravel(), gy.ravel()), counts.ravel(), jobs)
        print(f"zones={nz} mean two-way distance={m:.2f} km")

    write_boundary(out / "boundary.geojson", rx, ry)
    write_asc(out / "population.asc", xll, yll, ncols, nrows, counts)
    write_points(out / "workplaces.csv", jobs, "work")
    write_points(out / "pois.csv", pois, "poi")
    write_weather(out / "weather_2020_synthetic.csv", np.random.default_rng(args.seed + 1))
    write_national_load(out / "national_load_synthetic.csv")


if __name__ == "__main__":
    main()
