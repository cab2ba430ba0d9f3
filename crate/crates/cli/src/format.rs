//! The group file format: a JSON object with a degree, a list of 0-based
//! image arrays, and an optional name.  Cycle notation is accepted on
//! input behind the `--cycles` flag and never emitted.

use serde::{Deserialize, Serialize};

use mclosure::{GeneratedGroup, Permutation};

#[derive(Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
}

#[derive(Debug, Deserialize)]
struct CycleGroupFile {
    degree: usize,
    generators: Vec<String>,
    #[serde(default)]
    name: Option<String>,
}

/// A parsed group along with its optional name.
#[derive(Debug)]
pub struct NamedGroup {
    pub group: GeneratedGroup,
    pub name: Option<String>,
}

pub fn parse_group_file(text: &str, cycles: bool) -> Result<NamedGroup, String> {
    if cycles {
        let file: CycleGroupFile =
            serde_json::from_str(text).map_err(|e| format!("invalid group file: {e}"))?;
        let mut gens = Vec::with_capacity(file.generators.len());
        for s in &file.generators {
            gens.push(parse_cycle_string(file.degree, s)?);
        }
        let group = GeneratedGroup::new(file.degree, gens).map_err(|e| e.to_string())?;
        Ok(NamedGroup {
            group,
            name: file.name,
        })
    } else {
        let file: GroupFile =
            serde_json::from_str(text).map_err(|e| format!("invalid group file: {e}"))?;
        let mut gens = Vec::with_capacity(file.generators.len());
        for images in file.generators {
            if images.len() != file.degree {
                return Err(format!(
                    "generator has length {}, degree is {}",
                    images.len(),
                    file.degree
                ));
            }
            gens.push(Permutation::from_images(images).map_err(|e| e.to_string())?);
        }
        let group = GeneratedGroup::new(file.degree, gens).map_err(|e| e.to_string())?;
        Ok(NamedGroup {
            group,
            name: file.name,
        })
    }
}

/// Parses disjoint-cycle notation like `"(0 1 2)(3 4)"`; commas also
/// separate points, `"()"` or an empty string is the identity.
pub fn parse_cycle_string(degree: usize, text: &str) -> Result<Permutation, String> {
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let Some(stripped) = rest.strip_prefix('(') else {
            return Err(format!("expected '(' in cycle string at: {rest}"));
        };
        let Some(end) = stripped.find(')') else {
            return Err("unclosed cycle".into());
        };
        let inner = &stripped[..end];
        let points: Result<Vec<usize>, String> = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|e| format!("bad point {s}: {e}")))
            .collect();
        let points = points?;
        if !points.is_empty() {
            cycles.push(points);
        }
        rest = stripped[end + 1..].trim_start();
    }
    Permutation::from_cycles(degree, &cycles).map_err(|e| e.to_string())
}

pub fn group_to_file(group: &GeneratedGroup, name: Option<String>) -> GroupFile {
    GroupFile {
        degree: group.degree(),
        generators: group
            .generators()
            .iter()
            .map(|g| g.images().to_vec())
            .collect(),
        name,
    }
}
