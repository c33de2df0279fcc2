//! Rule- and gazetteer-based question features.
//!
//! Eight feature groups are extracted from raw question text: the question
//! type, the expected resource type of the answer, the wh-word, the
//! entity-merged token count, comparative and superlative markers, and seven
//! entity-presence flags. Extraction is deterministic: the same text and
//! gazetteer always produce the same features.

mod encode;
mod gazetteer;

pub use encode::{EncodingSchema, FeatureGroup, FeatureVector};
pub use gazetteer::{tokenize_merged, Gazetteer, Token};

use serde::{Deserialize, Serialize};

use crate::dataset::QuestionRecord;

/// Type of the expected answer set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuestionType {
    List,
    Boolean,
    Resource,
    Number,
}

impl QuestionType {
    pub const ALL: [QuestionType; 4] = [
        QuestionType::List,
        QuestionType::Boolean,
        QuestionType::Resource,
        QuestionType::Number,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            QuestionType::List => "List",
            QuestionType::Boolean => "Boolean",
            QuestionType::Resource => "Resource",
            QuestionType::Number => "Number",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "list" => Some(QuestionType::List),
            "boolean" => Some(QuestionType::Boolean),
            "resource" => Some(QuestionType::Resource),
            "number" => Some(QuestionType::Number),
            _ => None,
        }
    }
}

/// Type of the individual entries in the answer set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResourceType {
    Misc,
    Date,
    Boolean,
    Number,
    Person,
    Organization,
    Location,
}

impl ResourceType {
    pub const ALL: [ResourceType; 7] = [
        ResourceType::Misc,
        ResourceType::Date,
        ResourceType::Boolean,
        ResourceType::Number,
        ResourceType::Person,
        ResourceType::Organization,
        ResourceType::Location,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ResourceType::Misc => "Misc",
            ResourceType::Date => "Date",
            ResourceType::Boolean => "Boolean",
            ResourceType::Number => "Number",
            ResourceType::Person => "Person",
            ResourceType::Organization => "Organization",
            ResourceType::Location => "Location",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().trim_end_matches('.').to_lowercase().as_str() {
            "misc" => Some(ResourceType::Misc),
            "date" => Some(ResourceType::Date),
            "boolean" => Some(ResourceType::Boolean),
            "number" => Some(ResourceType::Number),
            "person" => Some(ResourceType::Person),
            "organization" => Some(ResourceType::Organization),
            "location" => Some(ResourceType::Location),
            _ => None,
        }
    }
}

/// Interrogative category read off the first tokens of the question.
///
/// `Ask` collects yes/no questions (auxiliary-verb start) and the
/// imperative "Give me" / "Show me" forms. `Other` is the total-function
/// bucket for anything that matches no rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WhType {
    Who,
    Which,
    How,
    InWhich,
    What,
    When,
    Where,
    Ask,
    Other,
}

impl WhType {
    pub const ALL: [WhType; 9] = [
        WhType::Who,
        WhType::Which,
        WhType::How,
        WhType::InWhich,
        WhType::What,
        WhType::When,
        WhType::Where,
        WhType::Ask,
        WhType::Other,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            WhType::Who => "Who",
            WhType::Which => "Which",
            WhType::How => "How",
            WhType::InWhich => "InWhich",
            WhType::What => "What",
            WhType::When => "When",
            WhType::Where => "Where",
            WhType::Ask => "Ask",
            WhType::Other => "Other",
        }
    }
}

/// Entity categories recognized by the gazetteer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntityType {
    Person,
    Money,
    Location,
    Percent,
    Organization,
    Date,
    Misc,
}

impl EntityType {
    pub const ALL: [EntityType; 7] = [
        EntityType::Person,
        EntityType::Money,
        EntityType::Location,
        EntityType::Percent,
        EntityType::Organization,
        EntityType::Date,
        EntityType::Misc,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            EntityType::Person => "Person",
            EntityType::Money => "Money",
            EntityType::Location => "Location",
            EntityType::Percent => "Percent",
            EntityType::Organization => "Organization",
            EntityType::Date => "Date",
            EntityType::Misc => "Misc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().trim_end_matches('.').to_lowercase().as_str() {
            "person" => Some(EntityType::Person),
            "money" => Some(EntityType::Money),
            "location" => Some(EntityType::Location),
            "percent" => Some(EntityType::Percent),
            "organization" => Some(EntityType::Organization),
            "date" => Some(EntityType::Date),
            "misc" => Some(EntityType::Misc),
            _ => None,
        }
    }

    fn index(&self) -> usize {
        EntityType::ALL.iter().position(|t| t == self).unwrap()
    }
}

/// Presence flags for the seven entity categories.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityFlags([bool; 7]);

impl EntityFlags {
    pub fn set(&mut self, t: EntityType) {
        self.0[t.index()] = true;
    }

    pub fn get(&self, t: EntityType) -> bool {
        self.0[t.index()]
    }

    pub fn as_array(&self) -> [bool; 7] {
        self.0
    }
}

/// The extracted feature bundle for one question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionFeatures {
    pub question_type: QuestionType,
    pub query_resource_type: ResourceType,
    pub wh_type: WhType,
    pub token_count: usize,
    pub comparative: bool,
    pub superlative: bool,
    pub entity_flags: EntityFlags,
}

// Words that always mark a comparative construction, independent of the
// gazetteer's comparative list.
const HARD_COMPARATIVES: [&str; 3] = ["than", "after", "before"];

// Tokens ending in "est" that are not superlatives.
const EST_EXCEPTIONS: [&str; 14] = [
    "west", "chest", "rest", "test", "forest", "interest", "honest", "arrest", "request",
    "contest", "protest", "harvest", "invest", "suggest",
];

const AUXILIARIES: [&str; 14] = [
    "is", "are", "was", "were", "did", "does", "do", "can", "has", "have", "will", "would",
    "could", "should",
];

// Skipped while scanning for the head noun after the wh-phrase.
const SCAN_STOPWORDS: [&str; 52] = [
    "is", "are", "was", "were", "do", "does", "did", "the", "a", "an", "of", "all", "me", "in",
    "on", "to", "for", "by", "with", "at", "from", "there", "that", "this", "these", "those",
    "you", "your", "i", "we", "they", "he", "she", "it", "his", "her", "their", "its", "one",
    "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "many", "much", "no",
    "list",
];

// "how <adjective>" forms that ask for a measurement.
const MEASURE_ADJECTIVES: [&str; 12] = [
    "short", "tall", "high", "long", "big", "old", "far", "heavy", "deep", "wide", "fast",
    "large",
];

// Head nouns with a known answer-entry type.
const NOUN_TYPES: [(&str, ResourceType); 77] = [
    ("city", ResourceType::Location),
    ("cities", ResourceType::Location),
    ("country", ResourceType::Location),
    ("countries", ResourceType::Location),
    ("state", ResourceType::Location),
    ("states", ResourceType::Location),
    ("river", ResourceType::Location),
    ("rivers", ResourceType::Location),
    ("capital", ResourceType::Location),
    ("place", ResourceType::Location),
    ("places", ResourceType::Location),
    ("borough", ResourceType::Location),
    ("boroughs", ResourceType::Location),
    ("town", ResourceType::Location),
    ("towns", ResourceType::Location),
    ("sea", ResourceType::Location),
    ("seas", ResourceType::Location),
    ("mountain", ResourceType::Location),
    ("mountains", ResourceType::Location),
    ("stadium", ResourceType::Location),
    ("stadiums", ResourceType::Location),
    ("empire", ResourceType::Location),
    ("empires", ResourceType::Location),
    ("museum", ResourceType::Location),
    ("museums", ResourceType::Location),
    ("continent", ResourceType::Location),
    ("continents", ResourceType::Location),
    ("company", ResourceType::Organization),
    ("companies", ResourceType::Organization),
    ("organization", ResourceType::Organization),
    ("organizations", ResourceType::Organization),
    ("party", ResourceType::Organization),
    ("parties", ResourceType::Organization),
    ("band", ResourceType::Organization),
    ("bands", ResourceType::Organization),
    ("team", ResourceType::Organization),
    ("teams", ResourceType::Organization),
    ("university", ResourceType::Organization),
    ("universities", ResourceType::Organization),
    ("school", ResourceType::Organization),
    ("schools", ResourceType::Organization),
    ("club", ResourceType::Organization),
    ("clubs", ResourceType::Organization),
    ("mayor", ResourceType::Person),
    ("president", ResourceType::Person),
    ("king", ResourceType::Person),
    ("queen", ResourceType::Person),
    ("coach", ResourceType::Person),
    ("coaches", ResourceType::Person),
    ("actor", ResourceType::Person),
    ("actors", ResourceType::Person),
    ("player", ResourceType::Person),
    ("players", ResourceType::Person),
    ("writer", ResourceType::Person),
    ("writers", ResourceType::Person),
    ("author", ResourceType::Person),
    ("authors", ResourceType::Person),
    ("scientist", ResourceType::Person),
    ("scientists", ResourceType::Person),
    ("person", ResourceType::Person),
    ("people", ResourceType::Person),
    ("son", ResourceType::Person),
    ("daughter", ResourceType::Person),
    ("wife", ResourceType::Person),
    ("husband", ResourceType::Person),
    ("developer", ResourceType::Person),
    ("developers", ResourceType::Person),
    ("supervisor", ResourceType::Person),
    ("supervisors", ResourceType::Person),
    ("host", ResourceType::Person),
    ("hosts", ResourceType::Person),
    ("inventor", ResourceType::Person),
    ("inventors", ResourceType::Person),
    ("day", ResourceType::Date),
    ("date", ResourceType::Date),
    ("year", ResourceType::Date),
    ("number", ResourceType::Number),
];

fn is_auxiliary(word: &str) -> bool {
    AUXILIARIES.contains(&word)
}

fn is_scan_stopword(word: &str) -> bool {
    SCAN_STOPWORDS.contains(&word) || is_auxiliary(word)
}

fn noun_type(word: &str) -> Option<ResourceType> {
    NOUN_TYPES
        .iter()
        .find(|(noun, _)| *noun == word)
        .map(|(_, t)| *t)
}

/// Normalize one whitespace-separated word: strip leading and trailing
/// punctuation (apostrophes survive at the end, keeping possessives) and
/// lowercase the rest.
pub(crate) fn normalize_word(raw: &str) -> String {
    let start = raw
        .char_indices()
        .find(|(_, c)| c.is_alphanumeric())
        .map(|(i, _)| i);
    let Some(start) = start else {
        return String::new();
    };
    let end = raw
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_alphanumeric() || *c == '\'')
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(raw.len());
    raw[start..end].to_lowercase()
}

/// Punctuation-free lowercase tokens, without entity merging. Never empty
/// for non-blank input: text with no alphanumeric characters collapses to a
/// single token.
pub(crate) fn raw_tokens(text: &str) -> Vec<String> {
    let mut tokens: Vec<String> = text
        .split_whitespace()
        .map(normalize_word)
        .filter(|t| !t.is_empty())
        .collect();
    if tokens.is_empty() {
        tokens.push(text.trim().to_lowercase());
    }
    tokens
}

fn is_plural(word: &str) -> bool {
    word.chars().count() > 3
        && word.ends_with('s')
        && !word.ends_with("ss")
        && !word.ends_with("'s")
}

/// The wh-phrase of "In which ...", "To which ...", imperative and
/// auxiliary starts spans two tokens; scans for the head noun start after it.
fn scan_start(first: &str) -> usize {
    if matches!(first, "in" | "to" | "on" | "give" | "show") {
        2
    } else {
        1
    }
}

/// First head noun with a known type among the tokens after the wh-phrase.
/// Entity-merged tokens and stop words are skipped; at most six candidate
/// tokens are inspected.
fn scan_head_noun(merged: &[Token]) -> Option<ResourceType> {
    let start = scan_start(merged.first().map(|t| t.text.as_str()).unwrap_or(""));
    let mut scanned = 0;
    for token in merged.iter().skip(start) {
        if token.entity.is_some() || is_scan_stopword(&token.text) {
            continue;
        }
        scanned += 1;
        if let Some(t) = noun_type(&token.text) {
            return Some(t);
        }
        if scanned >= 6 {
            break;
        }
    }
    None
}

/// Plurality of the first candidate noun after the wh-phrase.
fn scan_plural(merged: &[Token]) -> bool {
    let start = scan_start(merged.first().map(|t| t.text.as_str()).unwrap_or(""));
    for token in merged.iter().skip(start) {
        if token.entity.is_some() || is_scan_stopword(&token.text) {
            continue;
        }
        return is_plural(&token.text);
    }
    false
}

/// Wh-type from the first two raw tokens.
pub fn wh_type(text: &str) -> WhType {
    let tokens = raw_tokens(text);
    let t0 = tokens[0].as_str();
    let t1 = tokens.get(1).map(String::as_str).unwrap_or("");
    if t0 == "in" && t1 == "which" {
        return WhType::InWhich;
    }
    if let Some(w) = wh_word(t0) {
        return w;
    }
    if is_auxiliary(t0) {
        return WhType::Ask;
    }
    if (t0 == "give" || t0 == "show") && t1 == "me" {
        return WhType::Ask;
    }
    if let Some(w) = wh_word(t1) {
        return w;
    }
    WhType::Other
}

fn wh_word(token: &str) -> Option<WhType> {
    match token {
        "who" | "whom" | "whose" => Some(WhType::Who),
        "which" => Some(WhType::Which),
        "how" => Some(WhType::How),
        "what" => Some(WhType::What),
        "when" => Some(WhType::When),
        "where" => Some(WhType::Where),
        _ => None,
    }
}

/// Extract all feature groups for one question.
///
/// Gold annotations on the record, when present, override the heuristic
/// question type and query resource type. Every input maps to some feature
/// assignment; unknown patterns land in the `Other` / `Misc` buckets.
pub fn extract(question: &QuestionRecord, gazetteer: &Gazetteer) -> QuestionFeatures {
    let tokens = raw_tokens(&question.text);
    let merged = tokenize_merged(&question.text, gazetteer);
    let wh = wh_type(&question.text);

    let t0 = tokens[0].as_str();
    let t1 = tokens.get(1).map(String::as_str).unwrap_or("");
    let imperative = (t0 == "give" || t0 == "show") && t1 == "me";
    let how_number = t0 == "how" && (t1 == "many" || t1 == "much" || MEASURE_ADJECTIVES.contains(&t1));

    let question_type = if wh == WhType::Ask {
        if imperative {
            QuestionType::List
        } else {
            QuestionType::Boolean
        }
    } else if how_number {
        QuestionType::Number
    } else if t1 == "are" || t1 == "were" || scan_plural(&merged) {
        QuestionType::List
    } else {
        QuestionType::Resource
    };

    let query_resource_type = match wh {
        WhType::Who => ResourceType::Person,
        WhType::When => ResourceType::Date,
        WhType::Where => ResourceType::Location,
        WhType::InWhich => scan_head_noun(&merged).unwrap_or(ResourceType::Location),
        WhType::How => {
            if how_number {
                ResourceType::Number
            } else {
                ResourceType::Misc
            }
        }
        WhType::Ask => {
            if imperative {
                scan_head_noun(&merged).unwrap_or(ResourceType::Misc)
            } else {
                ResourceType::Boolean
            }
        }
        _ => scan_head_noun(&merged).unwrap_or(ResourceType::Misc),
    };

    let mut comparative = false;
    let mut superlative = false;
    let mut entity_flags = EntityFlags::default();
    for token in &merged {
        match token.entity {
            Some(t) => entity_flags.set(t),
            None => {
                let w = token.text.as_str();
                if HARD_COMPARATIVES.contains(&w) || gazetteer.is_comparative(w) {
                    comparative = true;
                }
                if gazetteer.is_superlative(w)
                    || (w.chars().count() > 4
                        && w.ends_with("est")
                        && !EST_EXCEPTIONS.contains(&w))
                {
                    superlative = true;
                }
            }
        }
    }

    QuestionFeatures {
        question_type: question.annotations.question_type.unwrap_or(question_type),
        query_resource_type: question
            .annotations
            .query_resource_type
            .unwrap_or(query_resource_type),
        wh_type: wh,
        token_count: merged.len(),
        comparative,
        superlative,
        entity_flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Annotations;
    use crate::fixture;
    use proptest::prelude::*;

    fn record(text: &str) -> QuestionRecord {
        QuestionRecord::new(0, text)
    }

    #[test]
    fn running_example_features() {
        let gaz = fixture::gazetteer();
        let q = record("Which New York Nicks players from outside the USA are born after Robin Lopez?");
        let f = extract(&q, &gaz);
        assert_eq!(f.question_type, QuestionType::List);
        assert_eq!(f.query_resource_type, ResourceType::Person);
        assert_eq!(f.wh_type, WhType::Which);
        assert_eq!(f.token_count, 11);
        assert!(f.comparative);
        assert!(!f.superlative);
        assert!(f.entity_flags.get(EntityType::Organization));
        assert!(f.entity_flags.get(EntityType::Location));
        assert!(f.entity_flags.get(EntityType::Person));
        assert!(!f.entity_flags.get(EntityType::Money));
        assert!(!f.entity_flags.get(EntityType::Percent));
        assert!(!f.entity_flags.get(EntityType::Date));
        assert!(!f.entity_flags.get(EntityType::Misc));
    }

    #[test]
    fn yes_no_question_is_ask_and_boolean() {
        let gaz = fixture::gazetteer();
        let f = extract(&record("Did Kaurismäki ever win the Grand Prix at Cannes?"), &gaz);
        assert_eq!(f.wh_type, WhType::Ask);
        assert_eq!(f.question_type, QuestionType::Boolean);
        assert!(!f.superlative);
    }

    #[test]
    fn superlative_word_detected() {
        let gaz = fixture::gazetteer();
        let f = extract(&record("What is the biggest stadium in Spain?"), &gaz);
        assert!(f.superlative);
        assert_eq!(f.wh_type, WhType::What);
    }

    #[test]
    fn first_is_not_a_superlative() {
        let gaz = fixture::gazetteer();
        let f = extract(&record("What was the first Queen album?"), &gaz);
        assert!(!f.superlative);
    }

    #[test]
    fn merged_token_counts() {
        let gaz = fixture::gazetteer();
        let merged = tokenize_merged(
            "Which New York Nicks players from outside the USA are born after Robin Lopez?",
            &gaz,
        );
        let texts: Vec<&str> = merged.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(
            texts,
            [
                "which", "new york nicks", "players", "from", "outside", "the", "usa", "are",
                "born", "after", "robin lopez"
            ]
        );
        assert_eq!(tokenize_merged("Hello", &gaz).len(), 1);
        assert_eq!(tokenize_merged("Who is the mayor of Paris?", &gaz).len(), 6);
    }

    #[test]
    fn longest_gazetteer_match_wins() {
        let gaz = fixture::gazetteer();
        let merged = tokenize_merged("Which New York Nicks players are from New York?", &gaz);
        assert_eq!(merged[1].text, "new york nicks");
        assert_eq!(merged[1].entity, Some(EntityType::Organization));
        let last = merged.last().unwrap();
        assert_eq!(last.text, "new york");
        assert_eq!(last.entity, Some(EntityType::Location));
    }

    #[test]
    fn annotations_override_heuristics() {
        let gaz = fixture::gazetteer();
        let mut q = record("Who is the mayor of Paris?");
        q.annotations = Annotations {
            question_type: Some(QuestionType::Number),
            query_resource_type: Some(ResourceType::Date),
        };
        let f = extract(&q, &gaz);
        assert_eq!(f.question_type, QuestionType::Number);
        assert_eq!(f.query_resource_type, ResourceType::Date);
    }

    #[test]
    fn ask_rules_cover_auxiliaries_and_imperatives() {
        for text in [
            "Is this real?",
            "Are birds dinosaurs?",
            "Was it cold?",
            "Were they there?",
            "Did it happen?",
            "Does it work?",
            "Do ants sleep?",
            "Can you cry underwater?",
            "Has it begun?",
            "Have they left?",
            "Give me all South American countries.",
            "Show me all Czech movies.",
        ] {
            assert_eq!(wh_type(text), WhType::Ask, "{text}");
        }
        assert_eq!(wh_type("In which city did Nikos Kazantzakis die?"), WhType::InWhich);
        assert_eq!(wh_type("To which party does the mayor of Paris belong?"), WhType::Which);
        assert_eq!(wh_type("On which day is Columbus Day?"), WhType::Which);
        assert_eq!(wh_type("In what city is the Heineken brewery?"), WhType::What);
        assert_eq!(wh_type("Whom did Lance Bass marry?"), WhType::Who);
        assert_eq!(wh_type("Zephyr quandary?"), WhType::Other);
    }

    #[test]
    fn comparative_words_trigger_flag() {
        let gaz = fixture::gazetteer();
        assert!(extract(&record("Who became president after JFK died?"), &gaz).comparative);
        assert!(extract(&record("Which countries have more than ten volcanoes?"), &gaz).comparative);
        assert!(!extract(&record("Who wrote Harry Potter?"), &gaz).comparative);
    }

    #[test]
    fn extraction_is_deterministic() {
        let gaz = fixture::gazetteer();
        for q in fixture::questions() {
            assert_eq!(extract(&q, &gaz), extract(&q, &gaz));
        }
    }

    #[test]
    fn token_count_matches_tokenizer() {
        let gaz = fixture::gazetteer();
        for q in fixture::questions() {
            let f = extract(&q, &gaz);
            assert_eq!(f.token_count, tokenize_merged(&q.text, &gaz).len());
            assert!(f.token_count >= 1);
        }
    }

    proptest! {
        #[test]
        fn wh_rules_are_sound(text in "[A-Za-z' ]{1,40}") {
            prop_assume!(!text.trim().is_empty());
            let toks = raw_tokens(&text);
            let wh = wh_type(&text);
            if toks.len() >= 2 && toks[0] == "in" && toks[1] == "which" {
                prop_assert_eq!(wh, WhType::InWhich);
            } else if ["is", "are", "was", "were", "did", "does", "do", "can", "has", "have"]
                .contains(&toks[0].as_str())
            {
                prop_assert_eq!(wh, WhType::Ask);
            } else if toks.len() >= 2
                && (toks[0] == "give" || toks[0] == "show")
                && toks[1] == "me"
            {
                prop_assert_eq!(wh, WhType::Ask);
            }
        }

        #[test]
        fn tokenizer_never_returns_empty(text in "\\PC{1,60}") {
            prop_assume!(!text.trim().is_empty());
            let gaz = Gazetteer::empty();
            prop_assert!(!tokenize_merged(&text, &gaz).is_empty());
        }
    }
}
