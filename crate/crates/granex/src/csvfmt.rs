//! Small CSV helpers shared by the trajectory and distribution exporters.
//! Quoting follows RFC 4180: fields containing commas, quotes or line breaks
//! are wrapped in double quotes with embedded quotes doubled.

/// Escape a single field.
pub fn field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        let mut out = String::with_capacity(s.len() + 2);
        out.push('"');
        for ch in s.chars() {
            if ch == '"' {
                out.push('"');
            }
            out.push(ch);
        }
        out.push('"');
        out
    } else {
        s.to_string()
    }
}

/// Join fields into one CRLF-free CSV record.
pub fn record<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    fields
        .into_iter()
        .map(|f| field(f.as_ref()))
        .collect::<Vec<_>>()
        .join(",")
}

/// Shortest round-trip decimal form of a float.
pub fn num(v: f64) -> String {
    format!("{v}")
}
