"""Rasterize coarse continent outlines into the 1-degree LANDMASK v1 grid.

Usage: python3 tools/landmask.py > crates/core/data/landmask_1deg.txt

Outlines are hand-simplified (lon, lat) rings, accurate to roughly a degree.
A cell is land when at least half of a 4x4 sub-sample inside it falls on
land (inside a land ring and outside every inland-water ring).
"""

LAND = {
    "north_america": [
        (-168, 66), (-162, 70), (-156, 71.3), (-141, 69.6), (-128, 70), (-115, 68),
        (-95, 72), (-85, 69), (-82, 66), (-90, 64), (-94, 59), (-92, 57), (-85, 55),
        (-80, 51), (-78, 56), (-77, 60), (-72, 62), (-65, 60), (-61, 56), (-56, 52),
        (-60, 48), (-65, 48.5), (-64, 45.5), (-67, 44.5), (-70, 42), (-74, 40.5),
        (-76, 37), (-75.5, 35), (-78, 33.8), (-81, 31.5), (-80.1, 27), (-80.5, 25.2),
        (-81.8, 26.5), (-83, 29), (-85, 29.7), (-89, 30.3), (-90, 29.2), (-94, 29.6),
        (-97.3, 27.5), (-97.5, 25), (-97.7, 21.8), (-96, 19), (-94.5, 18.2), (-91, 19),
        (-90.4, 21), (-87, 21.5), (-87.5, 18), (-88.3, 16), (-84, 15.8), (-83.3, 11),
        (-81.5, 9), (-79, 9.5), (-77.4, 8.7), (-77.9, 7.2), (-79.5, 8), (-81, 7.5),
        (-83, 8.5), (-85.7, 10), (-87.5, 13), (-91, 14), (-94, 16), (-96.5, 15.7),
        (-100, 17), (-105.5, 20), (-105.5, 22.5), (-108, 25), (-112, 29), (-114.7, 31.7),
        (-113, 30), (-109.5, 23), (-112, 25.5), (-114, 28), (-116.7, 31.7),
        (-117.2, 32.7), (-120.6, 34.5), (-122.5, 37.5), (-124.2, 40.3), (-124, 46),
        (-124.7, 48.4), (-123, 49), (-127, 50.5), (-130, 54.5), (-133, 57),
        (-137, 58.5), (-140, 60), (-146, 60.8), (-152, 59), (-154, 57.5),
        (-158, 56.5), (-163, 55), (-158, 58.5), (-162, 60), (-165, 62.5),
        (-164, 64.5), (-168, 65.5),
    ],
    "greenland": [
        (-73, 78), (-60, 82), (-30, 83.5), (-12, 81.5), (-18, 76), (-22, 70), (-32, 68),
        (-40, 65), (-43, 60), (-48, 61), (-52, 65), (-54, 68), (-55, 71), (-60, 76),
        (-68, 77),
    ],
    "baffin": [
        (-90, 72), (-80, 73.5), (-68, 70.5), (-62, 67), (-66, 62), (-72, 63),
        (-78, 64.5), (-82, 68), (-88, 70),
    ],
    "arctic_archipelago": [
        (-125, 72), (-115, 77), (-100, 80), (-85, 83), (-62, 82.5), (-75, 79),
        (-80, 76), (-90, 74.5), (-100, 72.5), (-105, 69), (-115, 69), (-125, 71),
    ],
    "newfoundland": [(-59.4, 47.6), (-55.5, 51.6), (-53, 49), (-52.7, 46.7), (-56, 47.5)],
    "cuba": [
        (-85, 21.9), (-82, 23.2), (-80, 23), (-77, 21.5), (-74.2, 20.2), (-77.7, 19.9),
        (-78.5, 21.5), (-81.8, 22.2),
    ],
    "hispaniola": [
        (-74.4, 18.5), (-72.8, 19.9), (-69.9, 19.6), (-68.4, 18.5), (-71.5, 17.7),
        (-74.2, 18.2),
    ],
    "south_america": [
        (-77.4, 8.7), (-75.5, 10.7), (-72, 12), (-71.5, 11), (-68, 10.6), (-62, 10.7),
        (-60, 8.5), (-57, 6), (-52, 5), (-50, 1.8), (-48, -1), (-44, -2.5), (-39, -3.5),
        (-35, -5.5), (-35, -9), (-38.5, -13), (-39, -18), (-41, -22), (-44, -23),
        (-48.5, -26.5), (-48.7, -28.5), (-51, -31), (-53.5, -34), (-57, -34.5),
        (-58.5, -34.5), (-57, -36.5), (-57.5, -38.5), (-62, -39), (-65, -41),
        (-64, -42.5), (-65.5, -45), (-67.5, -46.5), (-66, -48), (-68.5, -50.5),
        (-68.5, -52.5), (-70, -54), (-72, -54), (-74.5, -52), (-75.5, -48), (-74, -44),
        (-73.5, -40), (-73.5, -37), (-71.6, -33), (-71.5, -28), (-70.5, -23),
        (-70.3, -18.5), (-75, -15.5), (-76.5, -13), (-79.5, -7.5), (-81.3, -4.5),
        (-80, -2), (-80.5, 0), (-79, 1.8), (-77.5, 4), (-77.5, 7),
    ],
    "africa": [
        (-17, 21), (-16, 24), (-13, 27.8), (-10, 29.5), (-9.5, 32.5), (-6.5, 34.5),
        (-5.5, 35.9), (-2, 35.1), (3, 36.8), (9.8, 37.3), (11, 37), (10.2, 34.5),
        (11, 33.2), (15, 32.3), (19.5, 30.5), (20, 32), (22, 32.9), (25, 31.8),
        (29, 30.9), (32, 31.3), (32.5, 30), (33.5, 27), (35.5, 24), (37.3, 21),
        (39, 16), (41.2, 14.4), (43.3, 12.5), (44, 11), (51.2, 11.8), (51, 10.4),
        (48, 4.5), (44, 1), (41, -2), (39.2, -4.7), (39.4, -8), (40.5, -11),
        (40.6, -15), (37, -17.5), (35, -20), (35.5, -24), (32.8, -26), (32.4, -28.7),
        (30.5, -31), (27.5, -33.5), (25, -34), (20, -34.8), (18.4, -34), (17.8, -31),
        (15.2, -27), (14.5, -22.5), (11.8, -17.3), (13.5, -11.5), (12.2, -6), (9, -1),
        (9.5, 2.5), (9.6, 4), (8.5, 4.5), (6, 4.3), (3, 6.3), (1, 5.9), (-2, 4.8),
        (-4, 5.2), (-7.5, 4.4), (-11, 6.8), (-13.3, 8.5), (-15, 11), (-16.8, 13.4),
        (-17.5, 14.7), (-16.3, 19), (-16.9, 21.5),
    ],
    "sinai": [(32.5, 31.1), (34.2, 31.3), (34.9, 29.5), (34.2, 27.8), (32.7, 29.8)],
    "madagascar": [
        (49.3, -12), (50.5, -15.5), (47.2, -25), (45.2, -25.5), (43.3, -22),
        (44.3, -16.3), (47, -15.5),
    ],
    "eurasia": [
        (-9.5, 43), (-9, 39), (-9, 37), (-6, 36.2), (-5.5, 36), (-2, 36.7), (0, 38.8),
        (0.3, 40), (3.2, 42), (3, 43.3), (4.8, 43.4), (6.8, 43.3), (8.5, 44.4),
        (10.2, 43.8), (12, 42), (15.6, 40), (16, 38), (17, 39), (16.5, 40.5),
        (18.5, 40.1), (16, 41.8), (13.6, 43.5), (12.3, 44.9), (13.5, 45.7), (15, 44.7),
        (19.5, 41.9), (20, 39.7), (21.5, 37), (23, 36.5), (23, 38), (24, 38.2),
        (22.8, 40.5), (26.2, 40.8), (26, 40), (27.2, 38.5), (28, 36.7), (30.5, 36.3),
        (33, 36.1), (36.2, 36.6), (35.8, 35.5), (35, 32.8), (34.2, 31.3), (34.9, 29.5),
        (36.5, 26.5), (39, 22), (42.7, 15.5), (43.4, 12.7), (45, 12.8), (48.5, 14),
        (52, 15.8), (55.5, 17.8), (57.8, 19), (59.8, 22.5), (58, 23.8), (56.4, 26.3),
        (56, 24.5), (54, 24.2), (51.5, 24.5), (51, 26), (50, 26.6), (48.5, 28.5),
        (48, 30), (50, 30.2), (51.5, 27.9), (54.5, 26.6), (56.5, 27), (57.5, 25.7),
        (61.5, 25.2), (66.5, 25.4), (67.5, 24), (68.8, 22.5), (70.5, 21), (72.8, 21),
        (72.9, 19), (73.5, 16), (74.8, 12.8), (76.3, 9.6), (77.5, 8.1), (78.2, 9),
        (79.3, 10.3), (80.2, 13.5), (80.2, 15.8), (82.3, 16.6), (86.5, 20), (87, 21.5),
        (89, 21.8), (91.8, 22.4), (92.3, 20.7), (94, 18), (94.3, 16), (97.6, 16.5),
        (98.6, 13.2), (98.5, 10), (98.3, 8), (100.3, 6), (101, 3), (103.5, 1.3),
        (104.3, 1.5), (103.5, 4.5), (102.2, 6.2), (100.5, 7.5), (100, 12.5),
        (101, 12.7), (103, 11), (104.5, 10.5), (106.5, 9.5), (108.8, 11.3),
        (109.3, 13.4), (108.8, 15.4), (106.5, 17.8), (105.8, 19), (106.7, 20.7),
        (108.5, 21.6), (110.5, 20.3), (111.8, 21.6), (113.5, 22.2), (116.5, 22.9),
        (119, 25), (120, 26.6), (121.5, 28.5), (122, 30), (121, 31), (121.8, 31.7),
        (120.3, 34.3), (119.2, 35), (120.3, 36), (122.5, 37), (121, 37.7), (119, 37.2),
        (118.5, 38), (117.5, 38.8), (118, 39.2), (121, 40.8), (121.5, 39), (124, 39.8),
        (125.3, 37.7), (126.5, 34.4), (129.3, 35.2), (129.4, 37), (128.3, 38.6),
        (127.5, 39.8), (129.7, 40.9), (130.7, 42.3), (133, 42.9), (135.5, 43.9),
        (138.5, 47), (140.5, 50.5), (141.4, 53.3), (137.5, 54), (135.2, 54.7),
        (140, 57.8), (143, 59.3), (149, 59.6), (154, 59.2), (155, 61.5), (160, 61.8),
        (157, 58), (156.7, 51), (158.5, 53), (160, 54.5), (163, 56), (162.5, 58),
        (164, 59.8), (170, 60), (177, 62.5), (179.99, 64.5), (179.99, 68.8), (175, 69.8),
        (170, 70), (160, 69.6), (150, 71.5), (140, 72.5), (130, 71), (128, 73),
        (118, 73.5), (113, 73.7), (110, 76.5), (104, 77.7), (98, 76), (88, 75.5),
        (80, 73.5), (75, 72.8), (72.5, 68), (69, 72.8), (66, 69.5), (60, 68.8),
        (57, 70.5), (53, 68.4), (44, 68.5), (44, 66), (40, 66), (36, 69), (30, 70),
        (25, 71), (18, 69.8), (14, 67.5), (12, 65), (8, 63), (5, 62), (5, 58.5),
        (7, 58), (10.5, 59.5), (11.5, 58.5), (12.5, 56), (14.2, 55.5), (16, 56.2),
        (18.5, 59.5), (17.5, 61), (21.5, 64.5), (21.5, 65.8), (25, 65.5), (22.5, 63.5),
        (21.3, 60.8), (23, 59.9), (28, 60.5), (29.5, 60), (24, 59.4), (23.5, 58.2),
        (21.5, 57.3), (21, 56), (19.7, 54.4), (17.5, 54.8), (14.2, 53.9), (11, 54),
        (9.9, 54.8), (8.5, 57), (10.5, 57.7), (10.8, 55.5), (8.6, 53.9), (7, 53.5),
        (4.8, 53), (3.5, 51.4), (1.8, 51), (1.5, 50), (0, 49.5), (-1.3, 49.7),
        (-1.9, 48.7), (-4.7, 48.4), (-4.3, 47.8), (-2, 47), (-1.2, 45), (-1.5, 43.4),
        (-3.8, 43.4), (-8, 43.7), (-9.3, 43.2),
    ],
    "chukotka": [(-180, 65), (-172, 64.5), (-169.7, 66), (-175, 67.5), (-180, 69)],
    "great_britain": [
        (-5.7, 50), (1.4, 51.2), (1.7, 52.7), (0, 53.5), (-1.5, 55), (-2, 57),
        (-1.8, 57.6), (-3.5, 58.6), (-5, 58.6), (-6, 56.5), (-5, 55), (-3, 54.5),
        (-3, 53.4), (-4.5, 52.5), (-5.2, 51.7), (-3, 51.2),
    ],
    "ireland": [(-6, 52), (-6, 54), (-7.5, 55.3), (-10, 54), (-10.3, 52), (-8, 51.5)],
    "iceland": [(-24, 65.5), (-22, 66.4), (-15, 66.5), (-13.5, 65), (-18, 63.4), (-22.7, 63.8)],
    "novaya_zemlya": [(52, 71.5), (56, 75.5), (68, 77), (60, 75), (57, 72), (55, 70.5)],
    "sakhalin": [(142, 46), (143.5, 46.5), (143, 49.5), (144.5, 54.3), (142.5, 54), (142, 51)],
    "honshu": [
        (130, 31.2), (131.5, 31.5), (132, 33.5), (135, 33.5), (136.8, 34.3), (139, 34.7),
        (140.8, 35.7), (141, 38.3), (142, 39.5), (141.4, 41.4), (140, 40.5),
        (139.8, 38.5), (137.3, 36.8), (135.6, 35.6), (132.5, 35.5), (131, 34.4),
        (129.5, 33.2),
    ],
    "hokkaido": [
        (140, 41.5), (141.2, 41.8), (143.2, 42), (145.5, 43.3), (145.1, 44.2),
        (142, 45.5), (141.5, 44), (139.8, 42.6),
    ],
    "taiwan": [(120.1, 23), (120.8, 22), (121.9, 24.5), (121.5, 25.3), (120.2, 23.8)],
    "sri_lanka": [(79.8, 6.2), (81.8, 7), (81.2, 8.7), (80, 9.8), (79.9, 8)],
    "sumatra": [
        (95.2, 5.6), (97.5, 5.2), (100.5, 2), (104, -1), (106, -3), (105.8, -5.8),
        (104, -5), (102.5, -4), (100.5, -1), (98.5, 1.7),
    ],
    "java": [
        (105.2, -6.8), (106, -5.9), (108.5, -6.5), (110.5, -6.8), (112.5, -6.8),
        (114.5, -7.7), (114.3, -8.7), (111, -8.2), (108, -7.8), (106.5, -7.4),
    ],
    "borneo": [
        (109, 1.5), (109.6, 2), (111, 1.8), (113, 3.2), (115.3, 4.9), (116.8, 7),
        (119.3, 5.3), (118, 4.3), (117.5, 1), (118.8, 1), (116.5, -2.5), (116, -3.8),
        (114.5, -3.5), (111.7, -3.1), (110, -1.5),
    ],
    "sulawesi": [
        (119.3, -5.5), (120.4, -5.6), (120.9, -2.7), (122.5, -4.5), (123.2, -4),
        (121.5, -1.5), (123.3, -0.8), (121, 0.4), (124.5, 0.4), (125, 1.5),
        (120.5, 0.7), (119.5, -0.8),
    ],
    "luzon": [
        (120, 16.3), (120.6, 18.5), (122.2, 18.5), (122.3, 16.5), (121.5, 14),
        (124, 12.6), (123.8, 13.8), (121, 13.8), (120.6, 14.5),
    ],
    "mindanao": [(122, 7), (122.2, 8), (124.5, 8.8), (126, 9.3), (126.5, 7), (125.5, 5.7), (124, 6.3)],
    "new_guinea": [
        (131, -1.3), (134, -0.8), (135, -3.3), (138, -1.6), (141, -2.6), (145, -4.4),
        (147.5, -6), (147.8, -8), (150, -10.5), (147, -10), (146, -8), (143.5, -8.5),
        (142.5, -9.3), (141, -9.1), (139, -8.2), (138, -8.3), (137.8, -5.3),
        (134.5, -3.8), (132.5, -4), (132, -2.8), (133.5, -2.3), (131.3, -1.7),
    ],
    "australia": [
        (113.5, -22), (114, -26), (115, -29.5), (115, -34), (118, -35), (123, -33.8),
        (126, -32.3), (131, -31.5), (134, -32.7), (135.7, -34.8), (137.8, -32.5),
        (138, -35.5), (140, -37.8), (143.5, -38.8), (146.3, -39.1), (150, -37.5),
        (151.2, -34), (153.1, -31), (153.6, -28), (153, -25), (150.5, -22.3),
        (149, -20.3), (146.3, -19), (145.3, -15), (143.5, -14), (142.5, -10.7),
        (141.5, -13), (141.6, -16.5), (140.5, -17.6), (139, -17), (135.5, -15),
        (136.8, -12.2), (132.6, -11.5), (131, -12.2), (129.4, -15), (126.5, -14),
        (124, -16.3), (122.2, -18), (121, -19.6), (117, -20.6), (114.2, -21.8),
    ],
    "tasmania": [(144.6, -40.7), (148.3, -40.9), (148, -43.2), (146, -43.6), (144.7, -41.5)],
    "nz_north": [
        (172.7, -34.4), (174.6, -36.5), (175.9, -37.5), (178.5, -37.7), (177, -39.3),
        (176.8, -40.3), (175.2, -41.6), (174.6, -39.8), (173.8, -39.2), (174.6, -37.9),
    ],
    "nz_south": [
        (172.7, -40.5), (174.3, -41.2), (173.5, -43), (172.7, -43.8), (171.2, -44.5),
        (170.6, -45.9), (169, -46.6), (166.5, -46), (168.2, -44), (170.8, -42.6),
        (172, -40.8),
    ],
    "antarctica": [
        (-180, -90), (180, -90), (180, -78), (165, -77), (165, -71), (150, -68.5),
        (130, -66), (110, -66), (90, -66), (80, -68), (70, -68), (55, -66), (40, -69),
        (20, -70), (0, -70), (-10, -71), (-20, -73), (-30, -77), (-40, -78), (-50, -77),
        (-60, -75), (-62, -70), (-60, -64), (-57, -63.3), (-64, -65), (-66, -68),
        (-72, -70), (-80, -72), (-100, -73), (-120, -74), (-140, -75), (-150, -77),
        (-160, -78), (-180, -78),
    ],
}

WATER = {
    "black_sea": [
        (28, 41.2), (29, 41.2), (31, 41.2), (34, 42), (36, 41.6), (38, 41), (41.5, 41.5),
        (41.7, 42.5), (40, 43.5), (38, 44.5), (37.5, 45.2), (35, 45), (33.5, 44.5),
        (32.5, 45.5), (31, 46.6), (30.2, 45.8), (29.6, 45), (28.6, 44), (27.7, 42.5),
    ],
    "caspian": [
        (47, 44.5), (49, 46.3), (51.5, 47), (53, 46.5), (53, 45), (51, 44.5), (51.3, 43.2),
        (52.7, 41.8), (54, 40.5), (53.9, 37.3), (51, 36.7), (49, 37.5), (49.5, 40.3),
        (48.5, 41.8), (47.5, 43),
    ],
}

ROWS, COLS, SUB = 180, 360, 4


def inside(ring, lon, lat):
    hit = False
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        if (y1 > lat) != (y2 > lat):
            x = x1 + (lat - y1) * (x2 - x1) / (y2 - y1)
            if lon < x:
                hit = not hit
    return hit


def is_land(lon, lat):
    if not any(inside(r, lon, lat) for r in LAND.values()):
        return False
    return not any(inside(r, lon, lat) for r in WATER.values())


def main():
    out = [f"LANDMASK v1 {ROWS} {COLS}"]
    for row in range(ROWS):
        top = 90 - row
        line = []
        for col in range(COLS):
            west = -180 + col
            hits = 0
            for i in range(SUB):
                for j in range(SUB):
                    lat = top - (i + 0.5) / SUB
                    lon = west + (j + 0.5) / SUB
                    hits += is_land(lon, lat)
            line.append("1" if 2 * hits >= SUB * SUB else "0")
        out.append("".join(line))
    print("\n".join(out))


if __name__ == "__main__":
    main()
