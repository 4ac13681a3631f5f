"""Synthetic multi-tenant alert streams in the AIT file schema.

Used when the real dataset is not on disk: the generator produces per
testbed files with the same fields (timestamp, name, host, event_label,
time_label) and a learnable temporal structure. Attack scenarios open
multi-hour windows during which a few categories and hosts emit labeled
attack events; background noise runs continuously, attack-capable
categories also appear benignly outside windows, and a small fraction of
out-of-window events carry spurious attack labels that the label rule
must correct to benign.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

DAY = 86400.0
HOUR = 3600.0

TENANT_NAMES = [
    "fox", "harrison", "russellmitchell", "santos",
    "shaw", "wardbeck", "wheeler", "wilson",
]


def generate_ait_like(out_dir: str | Path, seed: int = 7, n_tenants: int = 8,
                      days: float = 21.0, n_categories: int = 93,
                      hosts_per_tenant: int = 24, alerts_per_tenant_per_day: float = 450.0,
                      start: float = 1_642_118_400.0) -> list[Path]:
    """Write one JSONL file per tenant; returns the file paths."""
    rng = np.random.default_rng(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    categories = [f"ids.rule.{i:03d}" for i in range(n_categories)]
    n_attack_capable = max(6, n_categories // 4)
    attack_capable = list(rng.choice(n_categories, size=n_attack_capable, replace=False))
    scenario_types = ["bruteforce", "webshell", "exfil", "privesc", "scan"]

    # zipf-ish global category popularity, re-weighted per tenant
    base_popularity = 1.0 / np.arange(1, n_categories + 1) ** 1.1
    base_popularity /= base_popularity.sum()

    paths = []
    tenants = TENANT_NAMES[:n_tenants] + [
        f"testbed{i}" for i in range(len(TENANT_NAMES), n_tenants)
    ]
    for tenant in tenants:
        mix = base_popularity * rng.dirichlet(np.full(n_categories, 2.0)) * n_categories
        mix /= mix.sum()
        hosts = [f"{tenant}-host{j:02d}" for j in range(hosts_per_tenant)]
        host_pop = rng.dirichlet(np.full(hosts_per_tenant, 1.2))
        records = []

        n_background = rng.poisson(alerts_per_tenant_per_day * days)
        times = np.sort(rng.uniform(start, start + days * DAY, size=n_background))
        cats = rng.choice(n_categories, size=n_background, p=mix)
        host_idx = rng.choice(hosts_per_tenant, size=n_background, p=host_pop)

        # attack windows: (start, end, scenario, categories, hosts)
        windows = []
        for _ in range(int(rng.integers(3, 7))):
            w_start = rng.uniform(start + 0.5 * DAY, start + (days - 0.5) * DAY)
            w_len = rng.uniform(1.5 * HOUR, 9 * HOUR)
            w_cats = rng.choice(attack_capable, size=int(rng.integers(2, 5)), replace=False)
            w_hosts = rng.choice(hosts_per_tenant, size=int(rng.integers(1, 4)), replace=False)
            scenario = scenario_types[int(rng.integers(len(scenario_types)))]
            windows.append((w_start, w_start + w_len, scenario, set(w_cats), list(w_hosts)))

        def window_at(t: float):
            for w in windows:
                if w[0] <= t < w[1]:
                    return w
            return None

        for t, c, hi in zip(times, cats, host_idx):
            w = window_at(t)
            time_label = w[2] if w else ""
            # spurious attack labels outside windows, corrected by the rule
            event_label = ""
            if not w and rng.random() < 0.004:
                event_label = scenario_types[int(rng.integers(len(scenario_types)))]
            records.append((t, categories[c], hosts[hi], event_label, time_label))

        for w_start, w_end, scenario, w_cats, w_hosts in windows:
            burst = rng.poisson(rng.uniform(120, 420))
            atimes = np.sort(rng.uniform(w_start, w_end, size=burst))
            w_cat_list = sorted(w_cats)
            for t in atimes:
                c = w_cat_list[int(rng.integers(len(w_cat_list)))]
                hi = w_hosts[int(rng.integers(len(w_hosts)))]
                # most burst events are attack-labeled, some benign noise rides along
                event_label = scenario if rng.random() < 0.85 else ""
                records.append((t, categories[c], hosts[hi], event_label, scenario))

        records.sort(key=lambda r: r[0])
        path = out / f"{tenant}.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for t, name, host, event_label, time_label in records:
                fh.write(json.dumps({
                    "timestamp": round(float(t), 3),
                    "name": name,
                    "host": host,
                    "event_label": event_label,
                    "time_label": time_label,
                }, sort_keys=True) + "\n")
        paths.append(path)
    return paths
