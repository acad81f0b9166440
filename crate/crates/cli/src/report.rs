//! Plain-text certificate reports.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub tolerance: String,
    pub measured: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub title: String,
    pub info: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), ..Default::default() }
    }

    pub fn info(&mut self, line: impl Into<String>) {
        self.info.push(line.into());
    }

    fn push(&mut self, name: &str, tolerance: String, measured: String, pass: bool) {
        self.checks.push(Check { name: name.into(), tolerance, measured, pass });
    }

    /// Passes when `value < tol`.
    pub fn below(&mut self, name: &str, value: f64, tol: f64) {
        self.push(name, format!("< {tol:.1e}"), format!("{value:.3e}"), value < tol);
    }

    /// Passes when `value > bound`.
    pub fn above(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, format!("> {bound:.6e}"), format!("{value:.6e}"), value > bound);
    }

    pub fn equal(&mut self, name: &str, value: usize, expected: usize) {
        self.push(name, format!("= {expected}"), format!("{value}"), value == expected);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "== {} ==", self.title);
        for l in &self.info {
            let _ = writeln!(s, "{l}");
        }
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {:w$}  measured {}  tolerance {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance
            );
        }
        let _ = writeln!(s, "{}", if self.passed() { "result: PASS" } else { "result: FAIL" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_status() {
        let mut r = Report::new("demo");
        r.below("small", 1e-12, 1e-10);
        r.equal("dimension", 1, 1);
        assert!(r.passed());
        r.above("margin", 0.0, 1e-6);
        assert!(!r.passed());
        assert_eq!(r.first_failure().unwrap().name, "margin");
        let s = r.render();
        assert!(s.contains("PASS small"));
        assert!(s.contains("FAIL margin"));
        assert!(s.ends_with("result: FAIL\n"));
    }
}
