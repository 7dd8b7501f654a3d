use serde::Serialize;

use super::GridGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Top, Side::Bottom, Side::Left, Side::Right];

    pub fn bit(self) -> u8 {
        match self {
            Side::Top => 1,
            Side::Bottom => 2,
            Side::Left => 4,
            Side::Right => 8,
        }
    }
}

/// Six-way classification of a connected vertex set by the perimeter
/// sides of the grid it touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RegionType {
    /// No perimeter vertex.
    Interior = 1,
    /// Exactly one side.
    OneSide = 2,
    /// Two adjacent sides.
    AdjacentSides = 3,
    /// Two opposite sides.
    OppositeSides = 4,
    /// Three sides.
    ThreeSides = 5,
    /// All four sides.
    AllSides = 6,
}

impl RegionType {
    pub fn from_sides(mask: u8) -> Self {
        match mask.count_ones() {
            0 => RegionType::Interior,
            1 => RegionType::OneSide,
            2 => {
                let tb = Side::Top.bit() | Side::Bottom.bit();
                let lr = Side::Left.bit() | Side::Right.bit();
                if mask == tb || mask == lr {
                    RegionType::OppositeSides
                } else {
                    RegionType::AdjacentSides
                }
            }
            3 => RegionType::ThreeSides,
            _ => RegionType::AllSides,
        }
    }

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn class(self) -> TypeClass {
        if self == RegionType::Interior {
            TypeClass::Interior
        } else {
            TypeClass::Perimeter
        }
    }
}

/// Coarse grouping used by the counting bounds: type 1 against types 2-5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TypeClass {
    Interior,
    Perimeter,
}

impl TypeClass {
    pub fn label(self) -> &'static str {
        match self {
            TypeClass::Interior => "type1",
            TypeClass::Perimeter => "type2-5",
        }
    }
}

/// A vertex subset of a grid together with its boundary and type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSet {
    pub members: Vec<usize>,
    pub boundary: Vec<usize>,
    pub region_type: RegionType,
    pub connected: bool,
}

impl RegionSet {
    pub fn new(grid: &GridGraph, set: &[usize]) -> Result<Self> {
        let mask = grid.mask_of(set)?;
        Self::from_mask(grid, &mask)
    }

    pub(crate) fn from_mask(grid: &GridGraph, mask: &[bool]) -> Result<Self> {
        let members: Vec<usize> = (0..grid.n()).filter(|&v| mask[v]).collect();
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        let connected = grid.components(mask).len() == 1;
        Ok(Self {
            boundary: grid.boundary_of_mask(mask),
            region_type: RegionType::from_sides(grid.sides_touched(members.iter().copied())),
            connected,
            members,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Type of a non-empty connected vertex set.
pub fn classify_region(grid: &GridGraph, set: &[usize]) -> Result<RegionType> {
    let region = RegionSet::new(grid, set)?;
    if !region.connected {
        return Err(Error::DisconnectedSet);
    }
    Ok(region.region_type)
}

/// A region together with its filled-in closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilledRegion {
    pub origin: RegionSet,
    pub filled: Vec<usize>,
    pub boundary: Vec<usize>,
    pub filled_type: RegionType,
}

impl FilledRegion {
    pub fn area(&self) -> usize {
        self.filled.len()
    }

    pub fn perimeter(&self) -> usize {
        self.boundary.len()
    }
}

/// Fills in a connected type 1-5 set: the union of the set with every
/// component of its complement except one 3-sided component. When several
/// 3-sided components exist, the one holding the smallest vertex id is kept
/// outside.
pub fn fill_in(grid: &GridGraph, set: &[usize]) -> Result<FilledRegion> {
    let origin = RegionSet::new(grid, set)?;
    if !origin.connected {
        return Err(Error::DisconnectedSet);
    }
    if origin.region_type == RegionType::AllSides {
        return Err(Error::TypeSix);
    }
    let mut inside = grid.mask_of(&origin.members)?;
    let outside: Vec<bool> = inside.iter().map(|&b| !b).collect();
    let components = grid.components(&outside);
    // components are ordered by smallest vertex, so the first 3-sided one wins
    let kept = components
        .iter()
        .position(|comp| grid.sides_touched(comp.iter().copied()).count_ones() >= 3)
        .ok_or(Error::NoThreeSidedComponent)?;
    for (i, comp) in components.iter().enumerate() {
        if i != kept {
            for &v in comp {
                inside[v] = true;
            }
        }
    }
    let filled: Vec<usize> = (0..grid.n()).filter(|&v| inside[v]).collect();
    Ok(FilledRegion {
        boundary: grid.boundary_of_mask(&inside),
        filled_type: RegionType::from_sides(grid.sides_touched(filled.iter().copied())),
        filled,
        origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_grid;

    #[test]
    fn classify_examples() {
        let g4 = build_grid(4, 4).unwrap();
        assert_eq!(classify_region(&g4, &[g4.vertex(1, 1)]).unwrap(), RegionType::Interior);
        let g3 = build_grid(3, 3).unwrap();
        assert_eq!(classify_region(&g3, &[0]).unwrap(), RegionType::AdjacentSides);
        assert_eq!(classify_region(&g3, &[3, 4, 5]).unwrap(), RegionType::OppositeSides);
        assert_eq!(classify_region(&g3, &[1]).unwrap(), RegionType::OneSide);
        assert_eq!(classify_region(&g3, &[0, 1, 2, 5]).unwrap(), RegionType::ThreeSides);
        assert_eq!(classify_region(&g3, &[0, 1, 2, 5, 8, 7, 6]).unwrap(), RegionType::AllSides);
        assert_eq!(classify_region(&g3, &[0, 8]), Err(Error::DisconnectedSet));
        assert_eq!(classify_region(&g3, &[]), Err(Error::EmptySet));
    }

    #[test]
    fn fill_center_is_identity() {
        let g = build_grid(3, 3).unwrap();
        let f = fill_in(&g, &[4]).unwrap();
        assert_eq!(f.filled, vec![4]);
        assert_eq!(f.boundary.len(), 4);
    }

    #[test]
    fn fill_middle_row_keeps_top_row_outside() {
        let g = build_grid(3, 3).unwrap();
        let f = fill_in(&g, &[3, 4, 5]).unwrap();
        assert_eq!(f.filled, vec![3, 4, 5, 6, 7, 8]);
        assert_eq!(f.boundary.len(), 3);
        assert_eq!(f.filled_type, RegionType::ThreeSides);
    }

    #[test]
    fn fill_ring_absorbs_center() {
        let g = build_grid(5, 5).unwrap();
        let ring: Vec<usize> = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2), (3, 3)]
            .iter()
            .map(|&(r, c)| g.vertex(r, c))
            .collect();
        let f = fill_in(&g, &ring).unwrap();
        let mut expected = ring.clone();
        expected.push(g.vertex(2, 2));
        expected.sort_unstable();
        assert_eq!(f.filled, expected);
        assert_eq!(f.boundary.len(), 12);
    }

    #[test]
    fn fill_rejects_type_six() {
        let g = build_grid(3, 3).unwrap();
        assert_eq!(fill_in(&g, &[1, 3, 4, 5, 7]), Err(Error::TypeSix));
    }
}
