//! CSV output: header row, `\n` line endings, floats with 12 significant
//! digits.

/// Formats like C's `%.12g`.
pub fn fmt_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_fraction(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Keeps a free-text field inside one CSV cell.
pub fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            ',' => ';',
            '\n' | '\r' | '"' => ' ',
            c => c,
        })
        .collect()
}

pub struct Table {
    out: String,
    width: usize,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Self {
            out,
            width: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.width, "row width does not match header");
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}
