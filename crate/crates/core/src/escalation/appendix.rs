//! Forms realizing each critical integer as a truant.

/// The 46 critical integers for the odd target set.
pub const CRITICAL_INTEGERS: [u64; 46] = [
    1, 3, 5, 7, 11, 13, 15, 17, 19, 21, 23, 29, 31, 33, 35, 37, 39, 41, 47, 51, 53, 57, 59, 77, 83, 85, 87, 89,
    91, 93, 105, 119, 123, 133, 137, 143, 145, 187, 195, 203, 205, 209, 231, 319, 385, 451,
];

/// (form, truant) pairs; "0" is the zero form.
pub const TRUANT_TABLE: [(&str, u64); 46] = [
    ("0", 1),
    ("x^2", 3),
    ("x^2+2y^2", 5),
    ("x^2+3y^2+xy", 7),
    ("x^2+3y^2+4z^2+yz", 11),
    ("x^2+3y^2+6z^2+xy+yz", 13),
    ("x^2+y^2+3z^2", 15),
    ("x^2+2y^2+3z^2+xy+xz+2yz", 17),
    ("x^2+3y^2+7z^2+xy+yz", 19),
    ("x^2+3y^2+3z^2+xy+xz+2yz", 21),
    ("x^2+2y^2+3z^2+yz", 23),
    ("x^2+3y^2+3z^2+xy", 29),
    ("x^2+2y^2+4z^2+yz", 31),
    ("x^2+3y^2+4z^2+10w^2+2yw", 33),
    ("x^2+3y^2+5z^2+3yz", 35),
    ("x^2+2y^2+5z^2+12w^2+xz+xw+yz+3zw", 37),
    ("x^2+3y^2+5z^2+13w^2+xy+xz+yz", 39),
    ("x^2+3y^2+4z^2+xz+2yz", 41),
    ("x^2+3y^2+5z^2+15w^2+xw+yz+2yw+2zw", 47),
    ("x^2+3y^2+4z^2+15w^2+xw+3yz+zw", 51),
    ("x^2+3y^2+5z^2+21w^2+xz+2yz+yw+4zw", 53),
    ("x^2+3y^2+7z^2+9w^2+xy+2yw", 57),
    ("x^2+3y^2+5z^2+16w^2+yz+2yw+3zw", 59),
    ("x^2+y^2+3z^2+yz", 77),
    ("x^2+3y^2+5z^2+21w^2+3yz", 83),
    ("x^2+3y^2+5z^2+23w^2+xw+3yz+4zw", 85),
    ("x^2+3y^2+5z^2+9w^2+xz+3yw", 87),
    ("x^2+3y^2+5z^2+27w^2+xz+2yz+yw+2zw", 89),
    ("x^2+3y^2+7z^2+9w^2+21v^2+xy+yw+7zv", 91),
    ("x^2+2y^2+4z^2+28w^2+yz+zw", 93),
    ("x^2+3y^2+4z^2+11w^2+xw+2zw", 105),
    ("x^2+3y^2+5z^2+31w^2+3yz+3yw", 119),
    ("x^2+3y^2+4z^2+9w^2+3yw", 123),
    ("x^2+3y^2+7z^2+19w^2+57v^2+xy+yz+17wv", 133),
    ("x^2+3y^2+5z^2+26w^2+xw+3yz+3zw", 137),
    ("x^2+y^2+3z^2+47w^2+xw+yz", 143),
    ("x^2+3y^2+3z^2+29w^2+xy+2yz", 145),
    ("x^2+3y^2+3z^2+20w^2+xy+3zw", 187),
    ("x^2+3y^2+6z^2+13w^2+xy+yz", 195),
    ("x^2+2y^2+4z^2+29w^2+58v^2+xz+yz", 203),
    ("x^2+3y^2+4z^2+41w^2+xz+2yz", 205),
    ("x^2+y^2+3z^2+36w^2+xw+yz", 209),
    ("x^2+3y^2+4z^2+77w^2+143v^2+xy+15wv", 231),
    ("x^2+3y^2+4z^2+33w^2+xy", 319),
    ("x^2+3y^2+4z^2+77w^2+143v^2+xy+22wv", 385),
    ("x^2+3y^2+4z^2+77w^2+143v^2+xy+33wv", 451),
];

/// The three ternaries whose odd-universality is assumed.
pub const CONJECTURED_TERNARIES: [&str; 3] = ["x^2+2y^2+5z^2+xz", "x^2+3y^2+6z^2+xy+2yz", "x^2+3y^2+7z^2+xy+xz"];
