"""Regenerate price_history.csv.

Synthetic daily closes for Yahoo and Google. Raw log returns are drawn from a
seeded normal generator, then mapped linearly so that the zero-start EWMA
(lambda = 0.94) of the whole return history equals the target one-day
covariance exactly. The series ends at the spot prices used for hedging.
"""
import datetime as dt

import numpy as np

LAMBDA = 0.94
DAYS = 250  # returns; the file holds DAYS + 1 closes
TARGET = np.array([[0.00021176, 0.00010049], [0.00010049, 0.00017589]])
SPOT = np.array([39.73, 695.35])

rng = np.random.default_rng(20160901)
z = rng.standard_normal((DAYS, 2))
w = (1.0 - LAMBDA) * LAMBDA ** np.arange(DAYS - 1, -1, -1)
m = (z * w[:, None]).T @ z
a = np.linalg.cholesky(TARGET) @ np.linalg.inv(np.linalg.cholesky(m))
r = z @ a.T

log_p = np.log(SPOT) - np.vstack([np.cumsum(r[::-1], axis=0)[::-1], np.zeros((1, 2))])
prices = np.exp(log_p)

start = dt.date(2015, 9, 1)
days, d = [], start
while len(days) < DAYS + 1:
    if d.weekday() < 5:
        days.append(d)
    d += dt.timedelta(days=1)

with open("price_history.csv", "w") as f:
    f.write("date,Yahoo,Google\n")
    for day, (py, pg) in zip(days, prices):
        f.write(f"{day.isoformat()},{py:.10f},{pg:.10f}\n")
