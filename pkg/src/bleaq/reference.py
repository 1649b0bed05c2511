"""Published benchmark figures, kept as static reference data for side-by-side reports.

Function-evaluation magnitudes depend on solver internals that are not fully
specified, so these rows are for orientation only and are never asserted against.
Each FE entry is ``(lower, upper)``.
"""

from __future__ import annotations

# SMD1-SMD6 at 10 variables, nested baseline, 31 runs: best / median / mean / worst FE.
SMD_NESTED_FE = {
    "SMD1": {"best": (807538, 1180), "median": (1693710, 2497), "mean": (1782864.94, 2670.87), "worst": (2436525, 3356)},
    "SMD2": {"best": (940746, 1369), "median": (1524671, 2309), "mean": (1535369.41, 2500.74), "worst": (2548509, 3972)},
    "SMD3": {"best": (862708, 1113), "median": (1443053, 2101), "mean": (1405744.86, 2218.22), "worst": (1883302, 3143)},
    "SMD4": {"best": (528564, 727), "median": (1051430, 1614), "mean": (985106.94, 1627.05), "worst": (1567362, 2009)},
    "SMD5": {"best": (1216411, 1540), "median": (1825140, 2992), "mean": (1937586.63, 3100.91), "worst": (3107135, 4177)},
    "SMD6": {"best": (1209859, 1618), "median": (2398020, 2993), "mean": (2497097.41, 3012.01), "worst": (3202710, 4861)},
}

# SMD1-SMD6 at 10 variables, BLEAQ, 31 runs.
SMD_BLEAQ_FE = {
    "SMD1": {"best": (89966, 589), "median": (110366, 780), "mean": (117282.14, 782.55), "worst": (192835, 1636)},
    "SMD2": {"best": (67589, 364), "median": (92548, 615), "mean": (98392.73, 629.05), "worst": (141868, 1521)},
    "SMD3": {"best": (107516, 590), "median": (128493, 937), "mean": (146189.13, 906.99), "worst": (145910, 1132)},
    "SMD4": {"best": (58604, 391), "median": (74274, 735), "mean": (73973.84, 743.58), "worst": (101832, 1139)},
    "SMD5": {"best": (96993, 311), "median": (127961, 633), "mean": (132795.14, 626.44), "worst": (206718, 1316)},
    "SMD6": {"best": (90574, 640), "median": (125833, 970), "mean": (123941.14, 892.92), "worst": (196966, 1340)},
}

# Published savings annotations (nested / BLEAQ) as (median LL, median UL, mean LL, mean UL).
SMD_SAVINGS = {
    "SMD1": (15.35, 3.20, 15.20, 3.41),
    "SMD2": (16.47, 3.76, 15.60, 3.98),
    "SMD3": (11.23, 2.24, 9.62, 2.45),
    "SMD4": (14.16, 2.20, 13.32, 2.19),
    "SMD5": (14.26, 4.73, 14.59, 4.95),
    "SMD6": (19.06, 3.09, 20.15, 3.37),
}

ACCURACY_COLUMNS = ("median_ul_acc", "median_ll_acc", "median_ll_calls", "mean_ul_acc", "mean_ll_acc", "mean_ll_calls")

SMD_NESTED_ACCURACY = {
    "SMD1": (0.005365, 0.001616, 2497, 0.005893, 0.001467, 2670.87),
    "SMD2": (0.001471, 0.000501, 2309, 0.001582, 0.000539, 2500.74),
    "SMD3": (0.008485, 0.002454, 2101, 0.009660, 0.002258, 2218.22),
    "SMD4": (0.008140, 0.002866, 1614, 0.008047, 0.002530, 1627.05),
    "SMD5": (0.001285, 0.003146, 2992, 0.001311, 0.002904, 3100.91),
    "SMD6": (0.009403, 0.007082, 2993, 0.009424, 0.008189, 3012.01),
}

SMD_BLEAQ_ACCURACY = {
    "SMD1": (0.006664, 0.003347, 507, 0.006754, 0.003392, 467.84),
    "SMD2": (0.003283, 0.002971, 503, 0.003416, 0.002953, 504.15),
    "SMD3": (0.009165, 0.004432, 601, 0.008469, 0.003904, 585.60),
    "SMD4": (0.007345, 0.002796, 538, 0.006817, 0.002499, 543.27),
    "SMD5": (0.004033, 0.003608, 527, 0.004257, 0.004074, 525.08),
    "SMD6": (0.000012, 0.000008, 505, 0.000012, 0.000008, 546.34),
}

TP_BLEAQ_FE = {
    "TP1": {"best": (14115, 718), "median": (15041, 780), "mean": (14115.37, 695.09), "worst": (24658, 1348)},
    "TP2": {"best": (12524, 1430), "median": (14520, 1434), "mean": (13456.42, 1314.57), "worst": (16298, 2586)},
    "TP3": {"best": (4240, 330), "median": (4480, 362), "mean": (3983.47, 392.24), "worst": (6720, 518)},
    "TP4": {"best": (14580, 234), "median": (15300, 276), "mean": (15006.41, 278.72), "worst": (15480, 344)},
    "TP5": {"best": (10150, 482), "median": (15700, 1302), "mean": (14097.59, 1305.41), "worst": (15936, 1564)},
    "TP6": {"best": (14667, 230), "median": (17529, 284), "mean": (16961.32, 256.74), "worst": (21875, 356)},
    "TP7": {"best": (234622, 3224), "median": (267784, 4040), "mean": (268812.56, 4158.62), "worst": (296011, 5042)},
    "TP8": {"best": (10796, 1288), "median": (12300, 1446), "mean": (10435.71, 1629.77), "worst": (18086, 2080)},
    "TP9": {"best": (85656, 496), "median": (96618, 660), "mean": (92843.85, 672.84), "worst": (107926, 746)},
    "TP10": {"best": (87722, 530), "median": (101610, 618), "mean": (99754.59, 602.65), "worst": (114729, 692)},
}

TP_BLEAQ_ACCURACY = {
    "TP1": (0.000000, 0.000000, 206, 0.000000, 0.000000, 187.43),
    "TP2": (0.012657, 0.000126, 235, 0.013338, 0.000129, 239.12),
    "TP3": (0.000000, 0.000000, 112, 0.000000, 0.000000, 93.47),
    "TP4": (0.040089, 0.007759, 255, 0.037125, 0.007688, 234.57),
    "TP5": (0.008053, 0.040063, 203, 0.008281, 0.038688, 205.81),
    "TP6": (0.000099, 0.000332, 233, 0.000097, 0.000305, 214.71),
    "TP7": (0.093192, 0.093192, 3862, 0.089055, 0.095018, 3891.08),
    "TP8": (0.001819, 0.000064, 200, 0.001968, 0.000066, 188.40),
    "TP9": (0.000012, 0.000000, 623, 0.000012, 0.000000, 598.44),
    "TP10": (0.000103, 0.000000, 565, 0.000083, 0.000000, 572.35),
}

# Mean LL FE of BLEAQ and of three other methods; None where no figure was published.
TP_MEAN_LL_COMPARISON_COLUMNS = ("bleaq", "wjl", "wld", "nested")
TP_MEAN_LL_COMPARISON = {
    "TP1": (14810, 85499, 86067, 161204),
    "TP2": (14771, 256227, 171346, 242624),
    "TP3": (4376, 92526, 95851, 120728),
    "TP4": (15285, 291817, 211937, 272843),
    "TP5": (15403, 77302, 69471, 148148),
    "TP6": (17218, 163701, 65942, 181271),
    "TP7": (272971, 1074742, 944105, 864474),
    "TP8": (12065, 213522, 182121, 318575),
    "TP9": (93517, None, 352883, 665244),
    "TP10": (100357, None, 463752, 599434),
}


def reference_row(problem_id: str, algorithm: str = "bleaq") -> dict:
    """Published figures for one problem as a flat dict (empty when none exist)."""
    if problem_id.startswith("SMD"):
        fe = (SMD_BLEAQ_FE if algorithm == "bleaq" else SMD_NESTED_FE).get(problem_id)
        acc = (SMD_BLEAQ_ACCURACY if algorithm == "bleaq" else SMD_NESTED_ACCURACY).get(problem_id)
    elif algorithm == "bleaq":
        fe, acc = TP_BLEAQ_FE.get(problem_id), TP_BLEAQ_ACCURACY.get(problem_id)
    else:
        fe = acc = None
    row = {}
    if fe:
        for stat, (ll, ul) in fe.items():
            row[f"{stat}_ll_fe"] = ll
            row[f"{stat}_ul_fe"] = ul
    if acc:
        row.update(zip(ACCURACY_COLUMNS, acc))
    return row
