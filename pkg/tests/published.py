"""Published per-disaster counts and recall columns used as fixed reference values."""

TABLE_RECALL = [
    # disaster, region, n_matching, n_learning, n_agreement, recall_matching, recall_learning
    ('napa_earthquake', 'affected', 8548, 116187, 3948, 46.19, 3.4),
    ('napa_earthquake', 'unaffected', 851, 55678, 430, 50.53, 0.77),
    ('michigan_storm', 'affected', 2638, 31129, 1183, 44.84, 3.8),
    ('michigan_storm', 'unaffected', 1767, 38811, 689, 38.99, 1.78),
    ('newyork_storm', 'affected', 6952, 29412, 3786, 54.46, 12.87),
    ('newyork_storm', 'unaffected', 1611, 19154, 793, 49.22, 4.14),
    ('texas_storm', 'affected', 2871, 37044, 2237, 77.92, 6.04),
    ('texas_storm', 'unaffected', 4251, 37921, 1561, 36.72, 4.12),
    ('iowa_stf', 'affected', 1756, 8031, 933, 53.13, 11.62),
    ('iowa_stf', 'unaffected', 3782, 37304, 1702, 45.0, 4.56),
    ('iowa_stf2', 'affected', 2010, 17937, 1193, 59.35, 6.65),
    ('iowa_stf2', 'unaffected', 4145, 36501, 1821, 43.93, 4.99),
    ('iowa_storm', 'affected', 192, 1112, 61, 31.77, 5.49),
    ('iowa_storm', 'unaffected', 442, 1926, 57, 12.9, 2.96),
    ('washington_storm', 'affected', 283, 4657, 179, 63.25, 3.84),
    ('washington_storm', 'unaffected', 1873, 26976, 980, 52.32, 3.63),
    ('jersey_storm', 'affected', 382, 9088, 278, 72.77, 3.06),
    ('jersey_storm', 'unaffected', 1307, 38093, 862, 65.95, 2.26),
    ('california_fire', 'affected', 107, 656, 71, 66.36, 10.82),
    ('california_fire', 'unaffected', 643, 130494, 233, 36.24, 0.18),
    ('washington_mudslide', 'affected', 174, 2774, 104, 59.77, 3.75),
    ('washington_mudslide', 'unaffected', 1707, 26193, 860, 50.38, 3.28),
]

# spam users, all users, spam tweets, all tweets
SPAM_COUNTS = (1937, 144297, 928174, 3978713)
