// Thin adapters from the public RACE / CosmosQA / ReClor distributions into
// the canonical dataset schema.

#include <fstream>
#include <sstream>
#include <string>

#include "mcqa/error.hpp"
#include "mcqa/ingestion.hpp"
#include "mcqa/serialize.hpp"

namespace mcqa {

namespace fs = std::filesystem;

namespace {

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// A file holding either one JSON document or one document per line.
std::vector<Json> read_documents(const fs::path& path) {
    const std::string text = read_all(path);
    std::vector<Json> docs;
    try {
        Json whole = Json::parse(text);
        if (whole.is_array()) {
            for (auto& d : whole) docs.push_back(std::move(d));
        } else {
            docs.push_back(std::move(whole));
        }
        return docs;
    } catch (const Json::parse_error&) {
        // fall through to JSONL
    }
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            docs.push_back(Json::parse(line));
        } catch (const Json::exception& e) {
            fail(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return docs;
}

std::size_t letter_index(const std::string& letter) {
    if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'Z') {
        fail(ErrorKind::InvalidLabel, "answer '" + letter + "' is not a capital letter");
    }
    return static_cast<std::size_t>(letter[0] - 'A');
}

std::size_t label_value(const Json& label) {
    if (label.is_number_integer()) {
        const auto v = label.get<std::int64_t>();
        if (v < 0) fail(ErrorKind::InvalidLabel, "negative label");
        return static_cast<std::size_t>(v);
    }
    if (label.is_string()) {
        const auto s = label.get<std::string>();
        std::size_t pos = 0;
        try {
            const auto v = std::stoul(s, &pos);
            if (pos == s.size()) return v;
        } catch (const std::exception&) {
        }
    }
    fail(ErrorKind::InvalidLabel, "label " + label.dump() + " is not a non-negative integer");
}

std::vector<McqItem> from_race(const std::vector<Json>& docs) {
    std::vector<McqItem> items;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const Json& doc = docs[d];
        const std::string base = doc.contains("id") ? doc.at("id").get<std::string>() : "race-" + std::to_string(d);
        const auto article = doc.at("article").get<std::string>();
        const auto& questions = doc.at("questions");
        const auto& options = doc.at("options");
        const auto& answers = doc.at("answers");
        if (questions.size() != options.size() || questions.size() != answers.size()) {
            fail(ErrorKind::ParseError, "passage '" + base + "' has mismatched questions/options/answers");
        }
        for (std::size_t q = 0; q < questions.size(); ++q) {
            McqItem item{base + "#" + std::to_string(q), article, questions[q].get<std::string>(),
                         options[q].get<std::vector<std::string>>(), letter_index(answers[q].get<std::string>())};
            items.push_back(std::move(item));
        }
    }
    return items;
}

std::vector<McqItem> from_cosmosqa(const std::vector<Json>& docs) {
    std::vector<McqItem> items;
    for (const Json& doc : docs) {
        McqItem item;
        item.id = doc.at("id").get<std::string>();
        item.context = doc.at("context").get<std::string>();
        item.question = doc.at("question").get<std::string>();
        for (int k = 0;; ++k) {
            const std::string key = "answer" + std::to_string(k);
            if (!doc.contains(key)) break;
            item.options.push_back(doc.at(key).get<std::string>());
        }
        item.answer_index = label_value(doc.at("label"));
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<McqItem> from_reclor(const std::vector<Json>& docs) {
    std::vector<McqItem> items;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const Json& doc = docs[d];
        McqItem item;
        item.id = doc.contains("id_string") ? doc.at("id_string").get<std::string>() : "reclor-" + std::to_string(d);
        item.context = doc.at("context").get<std::string>();
        item.question = doc.at("question").get<std::string>();
        item.options = doc.at("answers").get<std::vector<std::string>>();
        item.answer_index = label_value(doc.at("label"));
        items.push_back(std::move(item));
    }
    return items;
}

}  // namespace

std::vector<McqItem> convert_dataset(const std::string& format, const fs::path& in) {
    const auto docs = read_documents(in);
    std::vector<McqItem> items;
    try {
        if (format == "race") {
            items = from_race(docs);
        } else if (format == "cosmosqa") {
            items = from_cosmosqa(docs);
        } else if (format == "reclor") {
            items = from_reclor(docs);
        } else {
            fail(ErrorKind::InvalidArgument, "unknown dataset format '" + format + "' (race, cosmosqa, reclor)");
        }
    } catch (const Json::exception& e) {
        fail(ErrorKind::ParseError, in.string() + ": " + e.what());
    }
    if (items.empty()) fail(ErrorKind::EmptyDataset, "no questions found in '" + in.string() + "'");
    for (const auto& item : items) item.validate();
    return items;
}

}  // namespace mcqa
