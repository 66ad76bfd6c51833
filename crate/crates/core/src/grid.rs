//! ASCII grid maps for the office tasks, compiled to planning models.
//!
//! Glyphs: `#` wall, `.` floor, `S` start, `G` goal, `C` coffee machine,
//! `D` delivery room, `R` rubble the map's owner believes is impassable and
//! `r` rubble that can be cleared. Entering any rubble cell needs the fluent
//! `passable-<row>-<col>`, which holds initially only for `r` cells, and
//! costs more than a plain move.

use std::collections::BTreeSet;
use std::fmt;

use crate::cost::Cost;
use crate::planning::{ActionSchema, ModelError, Plan, PlanningModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Wall,
    Floor,
    Start,
    Goal,
    Coffee,
    Destination,
    Rubble { passable: bool },
}

impl Cell {
    fn glyph(self) -> char {
        match self {
            Cell::Wall => '#',
            Cell::Floor => '.',
            Cell::Start => 'S',
            Cell::Goal => 'G',
            Cell::Coffee => 'C',
            Cell::Destination => 'D',
            Cell::Rubble { passable: false } => 'R',
            Cell::Rubble { passable: true } => 'r',
        }
    }

    fn from_glyph(c: char) -> Option<Cell> {
        Some(match c {
            '#' => Cell::Wall,
            '.' => Cell::Floor,
            'S' => Cell::Start,
            'G' => Cell::Goal,
            'C' => Cell::Coffee,
            'D' => Cell::Destination,
            'R' => Cell::Rubble { passable: false },
            'r' => Cell::Rubble { passable: true },
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("line {line}, column {column}: unknown glyph `{glyph}`")]
    Glyph { line: usize, column: usize, glyph: char },
    #[error("rows have different widths")]
    Ragged,
    #[error("map must contain exactly one `{0}`")]
    Count(char),
    #[error("map needs either a goal `G` or a coffee `C` and delivery `D` pair, not both")]
    Objective,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Action costs used when compiling a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridCosts {
    pub step: Cost,
    pub rubble: Cost,
    pub pick: Cost,
    pub drop: Cost,
}

impl Default for GridCosts {
    fn default() -> Self {
        GridCosts {
            step: Cost::ONE,
            rubble: Cost::from_int(3),
            pick: Cost::ONE,
            drop: Cost::ONE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    cells: Vec<Vec<Cell>>,
}

pub type Pos = (usize, usize);

fn at(p: Pos) -> String {
    format!("at-{}-{}", p.0, p.1)
}

fn passable(p: Pos) -> String {
    format!("passable-{}-{}", p.0, p.1)
}

pub fn move_name(from: Pos, to: Pos) -> String {
    format!("move-{}-{}-{}-{}", from.0, from.1, to.0, to.1)
}

impl GridMap {
    pub fn parse(text: &str) -> Result<GridMap, GridError> {
        let mut cells = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let row = line
                .chars()
                .enumerate()
                .map(|(j, c)| {
                    Cell::from_glyph(c).ok_or(GridError::Glyph {
                        line: i + 1,
                        column: j + 1,
                        glyph: c,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            cells.push(row);
        }
        if cells.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(GridError::Ragged);
        }
        let map = GridMap { cells };
        let count = |c: Cell| map.positions_of(c).len();
        if count(Cell::Start) != 1 {
            return Err(GridError::Count('S'));
        }
        let (g, c, d) = (count(Cell::Goal), count(Cell::Coffee), count(Cell::Destination));
        match (g, c, d) {
            (1, 0, 0) | (0, 1, 1) => Ok(map),
            _ if g == 1 || (c == 0 && d == 0) => Err(GridError::Objective),
            _ if c != 1 => Err(GridError::Count('C')),
            _ => Err(GridError::Count('D')),
        }
    }

    pub fn height(&self) -> usize {
        self.cells.len()
    }

    pub fn width(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    pub fn cell(&self, p: Pos) -> Option<Cell> {
        self.cells.get(p.0)?.get(p.1).copied()
    }

    fn positions_of(&self, cell: Cell) -> Vec<Pos> {
        let mut out = Vec::new();
        for (r, row) in self.cells.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if *x == cell {
                    out.push((r, c));
                }
            }
        }
        out
    }

    pub fn start(&self) -> Pos {
        self.positions_of(Cell::Start)[0]
    }

    fn open(&self) -> Vec<Pos> {
        let mut out = Vec::new();
        for (r, row) in self.cells.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if *x != Cell::Wall {
                    out.push((r, c));
                }
            }
        }
        out
    }

    fn neighbours(&self, p: Pos) -> Vec<Pos> {
        let mut out = Vec::new();
        let (r, c) = p;
        if r > 0 {
            out.push((r - 1, c));
        }
        out.push((r + 1, c));
        if c > 0 {
            out.push((r, c - 1));
        }
        out.push((r, c + 1));
        out.into_iter()
            .filter(|&q| matches!(self.cell(q), Some(x) if x != Cell::Wall))
            .collect()
    }

    fn is_delivery(&self) -> bool {
        !self.positions_of(Cell::Coffee).is_empty()
    }

    /// The planning model this map describes.
    pub fn to_model(&self, costs: &GridCosts) -> Result<PlanningModel, GridError> {
        let open = self.open();
        let mut fluents: BTreeSet<String> = open.iter().map(|&p| at(p)).collect();
        let mut init: BTreeSet<String> = [at(self.start())].into();
        let mut actions = Vec::new();
        for &p in &open {
            if let Some(Cell::Rubble { passable: ok }) = self.cell(p) {
                fluents.insert(passable(p));
                if ok {
                    init.insert(passable(p));
                }
            }
        }
        for &from in &open {
            for to in self.neighbours(from) {
                let (cost, mut pre) = match self.cell(to) {
                    Some(Cell::Rubble { .. }) => (costs.rubble, vec![passable(to)]),
                    _ => (costs.step, vec![]),
                };
                pre.push(at(from));
                actions.push(ActionSchema::new(
                    &move_name(from, to),
                    cost,
                    pre,
                    vec![at(to)],
                    vec![at(from)],
                ));
            }
        }
        let goal: BTreeSet<String> = if self.is_delivery() {
            for f in ["hand-empty", "has-coffee", "coffee-delivered"] {
                fluents.insert(f.into());
            }
            init.insert("hand-empty".into());
            let c = self.positions_of(Cell::Coffee)[0];
            let d = self.positions_of(Cell::Destination)[0];
            actions.push(ActionSchema::new(
                "pick-coffee",
                costs.pick,
                vec![at(c), "hand-empty".into()],
                vec!["has-coffee".into()],
                vec!["hand-empty".into()],
            ));
            actions.push(ActionSchema::new(
                "drop-coffee",
                costs.drop,
                vec![at(d), "has-coffee".into()],
                vec!["coffee-delivered".into(), "hand-empty".into()],
                vec!["has-coffee".into()],
            ));
            ["coffee-delivered".to_string()].into()
        } else {
            [at(self.positions_of(Cell::Goal)[0])].into()
        };
        Ok(PlanningModel::new(fluents, actions, init, goal)?)
    }

    /// Robot position before the plan and after each step. Non-move steps
    /// keep the position; unknown moves are ignored.
    pub fn trace(&self, plan: &Plan) -> Vec<Pos> {
        let mut pos = self.start();
        let mut out = vec![pos];
        for step in &plan.steps {
            if let Some(to) = parse_move(step) {
                pos = to;
            }
            out.push(pos);
        }
        out
    }
}

fn parse_move(step: &str) -> Option<Pos> {
    let rest = step.strip_prefix("move-")?;
    let parts: Vec<usize> = rest.split('-').map(|x| x.parse().ok()).collect::<Option<_>>()?;
    match parts[..] {
        [_, _, r, c] => Some((r, c)),
        _ => None,
    }
}

impl fmt::Display for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.cells {
            let line: String = row.iter().map(|c| c.glyph()).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
