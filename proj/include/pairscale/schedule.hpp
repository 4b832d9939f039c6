#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pairscale/comparison.hpp"
#include "pairscale/entity.hpp"

namespace pairscale {

// Two-stage prompt pair for one attribute. {A} and {B} are the left and
// right entity placeholders and must appear exactly once in each stage.
struct PromptTemplate {
  std::string attribute;
  std::string stage1;
  std::string stage2;
};

PromptTemplate make_template(std::string attribute, std::string stage1,
                             std::string stage2);

// Built-in attributes: "ideology-liberal" and "knowledge-institution".
PromptTemplate builtin_template(const std::string& attribute);
bool is_builtin_attribute(const std::string& attribute);

// JSON file with fields attribute, stage1, stage2.
PromptTemplate load_template(const std::string& path);

std::string render_prompt(const std::string& text, const std::string& left,
                          const std::string& right);

// Stable fingerprint of a template's prompt texts for output metadata.
std::string template_hash(const PromptTemplate& tpl);

// All unordered pairs x repeats. Presentation order per task is a seeded
// coin flip and the task list is a seeded shuffle, so the schedule is a pure
// function of (roster order, repeats, attribute, seed).
std::vector<PairTask> schedule_pairs(const std::vector<Entity>& entities,
                                     int repeats, const std::string& attribute,
                                     std::uint64_t seed);
std::vector<PairTask> schedule_pairs_ids(const std::vector<std::string>& ids,
                                         int repeats,
                                         const std::string& attribute,
                                         std::uint64_t seed);

// Maps a stage-2 reply to an outcome. Trims whitespace, one layer of
// surrounding quotes and a trailing period (inside or outside the quotes),
// NFC-normalizes and case-folds,
// then tries exact match against the two names and "tie"; a unique substring
// occurrence of one name resolves to that name. Anything else is Unusable.
// Total: never throws, any byte sequence maps to one of the four outcomes.
Outcome parse_extraction(const std::string& reply, const std::string& left_name,
                         const std::string& right_name);

}  // namespace pairscale
