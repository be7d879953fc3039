use minerisk::figures::{format_value, Column, Table};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<Vec<Band>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Output {
    pub x_name: String,
    pub x: Vec<f64>,
    pub series: Vec<Series>,
}

impl Output {
    pub fn new(x_name: &str, x: Vec<f64>) -> Self {
        Self {
            x_name: x_name.to_string(),
            x,
            series: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>, mc: Option<Vec<Band>>) {
        self.series.push(Series {
            name: name.into(),
            values,
            mc,
        });
    }

    /// Display-scaled copy of a figure table.
    pub fn from_table(table: &Table) -> Self {
        let scaled = |c: &Column| c.values.iter().map(|v| v / c.unit.scale()).collect();
        let mut out = Output::new(&table.x.name, scaled(&table.x));
        for c in &table.series {
            let k = c.unit.scale();
            let mc = c.mc.as_ref().map(|m| {
                m.iter()
                    .map(|p| Band {
                        mean: p.mean / k,
                        stderr: p.stderr / k,
                    })
                    .collect()
            });
            out.push(c.name.clone(), scaled(c), mc);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut header = vec![self.x_name.clone()];
        for s in &self.series {
            header.push(s.name.clone());
            if s.mc.is_some() {
                header.push(format!("{}_mc", s.name));
                header.push(format!("{}_mc_stderr", s.name));
            }
        }
        let mut out = header.join(",");
        out.push('\n');
        for i in 0..self.x.len() {
            let mut row = vec![format_value(self.x[i])];
            for s in &self.series {
                row.push(format_value(s.values[i]));
                if let Some(mc) = &s.mc {
                    row.push(format_value(mc[i].mean));
                    row.push(format_value(mc[i].stderr));
                }
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("output serializes");
                s.push('\n');
                s
            }
        }
    }
}
