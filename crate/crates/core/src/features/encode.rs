//! Fixed-order numeric encoding of the extracted features.
//!
//! The full schema has 30 slots: one-hot blocks for the three categorical
//! features, one numeric slot for the token count, and 0/1 slots for the
//! nine boolean features. Feature-group subsets keep the canonical slot
//! order of the full schema.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{EntityType, QuestionFeatures, QuestionType, ResourceType, WhType};

/// The thirteen selectable feature groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureGroup {
    QuestionType,
    ResourceType,
    WhWord,
    TokenCount,
    Comparative,
    Superlative,
    EntityPerson,
    EntityMoney,
    EntityLocation,
    EntityPercent,
    EntityOrganization,
    EntityDate,
    EntityMisc,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 13] = [
        FeatureGroup::QuestionType,
        FeatureGroup::ResourceType,
        FeatureGroup::WhWord,
        FeatureGroup::TokenCount,
        FeatureGroup::Comparative,
        FeatureGroup::Superlative,
        FeatureGroup::EntityPerson,
        FeatureGroup::EntityMoney,
        FeatureGroup::EntityLocation,
        FeatureGroup::EntityPercent,
        FeatureGroup::EntityOrganization,
        FeatureGroup::EntityDate,
        FeatureGroup::EntityMisc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FeatureGroup::QuestionType => "QT",
            FeatureGroup::ResourceType => "QRT",
            FeatureGroup::WhWord => "QW",
            FeatureGroup::TokenCount => "#T",
            FeatureGroup::Comparative => "Comp",
            FeatureGroup::Superlative => "Sup",
            FeatureGroup::EntityPerson => "Pers",
            FeatureGroup::EntityMoney => "Money",
            FeatureGroup::EntityLocation => "Loc",
            FeatureGroup::EntityPercent => "Percent",
            FeatureGroup::EntityOrganization => "Org",
            FeatureGroup::EntityDate => "Date",
            FeatureGroup::EntityMisc => "Misc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let needle = s.trim();
        FeatureGroup::ALL
            .iter()
            .find(|g| g.name().eq_ignore_ascii_case(needle))
            .copied()
            .ok_or_else(|| Error::UnknownFeatureGroup(s.to_string()))
    }

    /// Parse a comma-separated list of group names.
    pub fn parse_list(s: &str) -> Result<Vec<FeatureGroup>> {
        let groups: Vec<FeatureGroup> = s
            .split(',')
            .filter(|part| !part.trim().is_empty())
            .map(FeatureGroup::parse)
            .collect::<Result<_>>()?;
        if groups.is_empty() {
            return Err(Error::EmptySelection);
        }
        Ok(groups)
    }

    pub fn width(&self) -> usize {
        match self {
            FeatureGroup::QuestionType => QuestionType::ALL.len(),
            FeatureGroup::ResourceType => ResourceType::ALL.len(),
            FeatureGroup::WhWord => WhType::ALL.len(),
            _ => 1,
        }
    }

    fn slot_names(&self) -> Vec<String> {
        match self {
            FeatureGroup::QuestionType => QuestionType::ALL
                .iter()
                .map(|v| format!("qt_{}", v.label().to_lowercase()))
                .collect(),
            FeatureGroup::ResourceType => ResourceType::ALL
                .iter()
                .map(|v| format!("qrt_{}", v.label().to_lowercase()))
                .collect(),
            FeatureGroup::WhWord => WhType::ALL
                .iter()
                .map(|v| format!("qw_{}", v.label().to_lowercase()))
                .collect(),
            FeatureGroup::TokenCount => vec!["token_count".into()],
            FeatureGroup::Comparative => vec!["comparative".into()],
            FeatureGroup::Superlative => vec!["superlative".into()],
            FeatureGroup::EntityPerson => vec!["ent_person".into()],
            FeatureGroup::EntityMoney => vec!["ent_money".into()],
            FeatureGroup::EntityLocation => vec!["ent_location".into()],
            FeatureGroup::EntityPercent => vec!["ent_percent".into()],
            FeatureGroup::EntityOrganization => vec!["ent_organization".into()],
            FeatureGroup::EntityDate => vec!["ent_date".into()],
            FeatureGroup::EntityMisc => vec!["ent_misc".into()],
        }
    }

    fn encode_into(&self, f: &QuestionFeatures, out: &mut Vec<f64>) {
        match self {
            FeatureGroup::QuestionType => {
                for v in QuestionType::ALL {
                    out.push(if f.question_type == v { 1.0 } else { 0.0 });
                }
            }
            FeatureGroup::ResourceType => {
                for v in ResourceType::ALL {
                    out.push(if f.query_resource_type == v { 1.0 } else { 0.0 });
                }
            }
            FeatureGroup::WhWord => {
                for v in WhType::ALL {
                    out.push(if f.wh_type == v { 1.0 } else { 0.0 });
                }
            }
            FeatureGroup::TokenCount => out.push(f.token_count as f64),
            FeatureGroup::Comparative => out.push(f.comparative as u8 as f64),
            FeatureGroup::Superlative => out.push(f.superlative as u8 as f64),
            FeatureGroup::EntityPerson => out.push(f.entity_flags.get(EntityType::Person) as u8 as f64),
            FeatureGroup::EntityMoney => out.push(f.entity_flags.get(EntityType::Money) as u8 as f64),
            FeatureGroup::EntityLocation => out.push(f.entity_flags.get(EntityType::Location) as u8 as f64),
            FeatureGroup::EntityPercent => out.push(f.entity_flags.get(EntityType::Percent) as u8 as f64),
            FeatureGroup::EntityOrganization => {
                out.push(f.entity_flags.get(EntityType::Organization) as u8 as f64)
            }
            FeatureGroup::EntityDate => out.push(f.entity_flags.get(EntityType::Date) as u8 as f64),
            FeatureGroup::EntityMisc => out.push(f.entity_flags.get(EntityType::Misc) as u8 as f64),
        }
    }
}

/// An ordered set of feature groups defining the slot layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSchema {
    groups: Vec<FeatureGroup>,
}

/// The encoded slots of one question under a particular schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub slots: Vec<f64>,
    pub schema_id: String,
}

impl EncodingSchema {
    /// The 30-slot schema over all thirteen groups.
    pub fn full() -> Self {
        EncodingSchema {
            groups: FeatureGroup::ALL.to_vec(),
        }
    }

    /// Schema over a subset of groups, deduplicated and held in canonical
    /// order regardless of the order given.
    pub fn with_groups(selection: &[FeatureGroup]) -> Result<Self> {
        if selection.is_empty() {
            return Err(Error::EmptySelection);
        }
        let groups: Vec<FeatureGroup> = FeatureGroup::ALL
            .iter()
            .filter(|g| selection.contains(g))
            .copied()
            .collect();
        Ok(EncodingSchema { groups })
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.groups
    }

    pub fn width(&self) -> usize {
        self.groups.iter().map(FeatureGroup::width).sum()
    }

    /// Stable identifier derived from the group list.
    pub fn id(&self) -> String {
        let names: Vec<&str> = self.groups.iter().map(FeatureGroup::name).collect();
        format!("v1:{}", names.join("+"))
    }

    pub fn slot_names(&self) -> Vec<String> {
        self.groups.iter().flat_map(|g| g.slot_names()).collect()
    }

    pub fn encode(&self, features: &QuestionFeatures) -> FeatureVector {
        let mut slots = Vec::with_capacity(self.width());
        for group in &self.groups {
            group.encode_into(features, &mut slots);
        }
        FeatureVector {
            slots,
            schema_id: self.id(),
        }
    }

    /// Sub-schema containing only the selected groups. Every selected group
    /// must be present in this schema.
    pub fn restrict(&self, selection: &[FeatureGroup]) -> Result<EncodingSchema> {
        if selection.is_empty() {
            return Err(Error::EmptySelection);
        }
        for group in selection {
            if !self.groups.contains(group) {
                return Err(Error::UnknownFeatureGroup(group.name().to_string()));
            }
        }
        EncodingSchema::with_groups(selection)
    }

    /// Project a vector encoded under this schema onto a sub-schema,
    /// preserving slot order.
    pub fn project(&self, target: &EncodingSchema, vector: &FeatureVector) -> Result<FeatureVector> {
        if vector.schema_id != self.id() {
            return Err(Error::InvalidParams(format!(
                "vector was encoded under schema `{}`, not `{}`",
                vector.schema_id,
                self.id()
            )));
        }
        if vector.slots.len() != self.width() {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                actual: vector.slots.len(),
            });
        }
        let mut slots = Vec::with_capacity(target.width());
        for group in &target.groups {
            let offset = self.group_offset(group)?;
            slots.extend_from_slice(&vector.slots[offset..offset + group.width()]);
        }
        Ok(FeatureVector {
            slots,
            schema_id: target.id(),
        })
    }

    fn group_offset(&self, group: &FeatureGroup) -> Result<usize> {
        let mut offset = 0;
        for g in &self.groups {
            if g == group {
                return Ok(offset);
            }
            offset += g.width();
        }
        Err(Error::UnknownFeatureGroup(group.name().to_string()))
    }
}
