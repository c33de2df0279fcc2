//! Static surface-form lookup used in place of statistical NER, plus the
//! entity-merging tokenizer built on top of it.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::features::{normalize_word, raw_tokens, EntityType};

/// Surface-form to entity-type lookup with comparative and superlative word
/// lists. Surfaces are case-normalized; multi-word surfaces are stored as
/// space-joined normalized tokens.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: HashMap<String, EntityType>,
    comparatives: HashSet<String>,
    superlatives: HashSet<String>,
    max_entry_tokens: usize,
}

#[derive(Deserialize)]
struct RawGazetteer {
    entities: Vec<RawEntity>,
    #[serde(default)]
    comparatives: Vec<String>,
    #[serde(default)]
    superlatives: Vec<String>,
}

#[derive(Deserialize)]
struct RawEntity {
    surface: String,
    #[serde(rename = "type")]
    entity_type: String,
}

impl Gazetteer {
    pub fn empty() -> Self {
        Gazetteer::default()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Gazetteer::from_json_str(&content, &path.display().to_string())
    }

    pub fn from_json_str(content: &str, source: &str) -> Result<Self> {
        let raw: RawGazetteer = serde_json::from_str(content)
            .map_err(|e| Error::parse(source, format!("line {}", e.line()), e.to_string()))?;
        let mut gazetteer = Gazetteer::empty();
        for entity in raw.entities {
            let entity_type = EntityType::parse(&entity.entity_type).ok_or_else(|| {
                Error::parse(
                    source,
                    format!("entity `{}`", entity.surface),
                    format!("unknown entity type `{}`", entity.entity_type),
                )
            })?;
            gazetteer.insert(&entity.surface, entity_type).map_err(|_| {
                Error::parse(
                    source,
                    format!("entity `{}`", entity.surface),
                    "duplicate surface form after normalization",
                )
            })?;
        }
        for word in raw.comparatives {
            gazetteer.comparatives.insert(normalize_word(&word));
        }
        for word in raw.superlatives {
            gazetteer.superlatives.insert(normalize_word(&word));
        }
        Ok(gazetteer)
    }

    /// Insert one surface form. Fails on duplicates after normalization.
    pub fn insert(&mut self, surface: &str, entity_type: EntityType) -> Result<()> {
        let key = normalize_surface(surface);
        if key.is_empty() {
            return Err(Error::InvalidParams(format!(
                "gazetteer surface `{surface}` is empty after normalization"
            )));
        }
        let tokens = key.split(' ').count();
        if self.entries.insert(key, entity_type).is_some() {
            return Err(Error::InvalidParams(format!(
                "duplicate gazetteer surface `{surface}`"
            )));
        }
        self.max_entry_tokens = self.max_entry_tokens.max(tokens);
        Ok(())
    }

    pub fn lookup(&self, surface: &str) -> Option<EntityType> {
        self.entries.get(surface).copied()
    }

    pub fn is_comparative(&self, word: &str) -> bool {
        self.comparatives.contains(word)
    }

    pub fn is_superlative(&self, word: &str) -> bool {
        self.superlatives.contains(word)
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    fn max_entry_tokens(&self) -> usize {
        self.max_entry_tokens.max(1)
    }
}

fn normalize_surface(surface: &str) -> String {
    surface
        .split_whitespace()
        .map(normalize_word)
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// One token of the merged token stream. Entity tokens hold the full matched
/// surface form as a single token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub entity: Option<EntityType>,
}

/// Punctuation-free tokens with maximal gazetteer matches merged, longest
/// match first, scanning left to right.
pub fn tokenize_merged(text: &str, gazetteer: &Gazetteer) -> Vec<Token> {
    let words = raw_tokens(text);
    let mut tokens = Vec::with_capacity(words.len());
    let mut i = 0;
    while i < words.len() {
        let window = gazetteer.max_entry_tokens().min(words.len() - i);
        let mut matched = false;
        for len in (1..=window).rev() {
            let surface = words[i..i + len].join(" ");
            if let Some(entity) = gazetteer.lookup(&surface) {
                tokens.push(Token {
                    text: surface,
                    entity: Some(entity),
                });
                i += len;
                matched = true;
                break;
            }
        }
        if !matched {
            tokens.push(Token {
                text: words[i].clone(),
                entity: None,
            });
            i += 1;
        }
    }
    tokens
}
