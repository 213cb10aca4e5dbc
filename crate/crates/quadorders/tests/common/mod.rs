//! Shared frozen data for the integration suites.

/// The known minimal field per taxonomy slot, as (d, type, form). Type
/// 4/form 1 has no known example and is absent.
pub const TAXONOMY_EXAMPLES: [(u64, u8, u8); 40] = [
    (1221562, 1, 1),
    (10, 1, 2),
    (302737, 2, 1),
    (185, 2, 2),
    (65, 2, 3),
    (4159957, 3, 1),
    (2581, 3, 2),
    (184861, 3, 3),
    (1285, 3, 4),
    (485, 3, 5),
    (85, 3, 6),
    (267, 4, 2),
    (779, 4, 3),
    (87, 4, 4),
    (115, 4, 5),
    (51, 4, 6),
    (15, 4, 7),
    (30, 5, 1),
    (70, 5, 2),
    (66, 5, 3),
    (665, 6, 1),
    (1065, 6, 2),
    (1265, 6, 3),
    (385, 6, 4),
    (273, 6, 5),
    (105, 6, 6),
    (9085, 7, 1),
    (861, 7, 2),
    (6357, 7, 3),
    (1965, 7, 4),
    (6461, 7, 5),
    (1005, 7, 6),
    (885, 7, 7),
    (165, 7, 8),
    (1085, 7, 9),
    (2301, 7, 10),
    (429, 7, 11),
    (1173, 7, 12),
    (357, 7, 13),
    (805, 7, 14),
];
