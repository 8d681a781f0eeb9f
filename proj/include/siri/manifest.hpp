#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "siri/errors.hpp"
#include "siri/model.hpp"
#include "siri/rng.hpp"
#include "siri/train.hpp"

namespace siri {

// key=value file with [section] headers. Keys before the first section live
// in the "" section. '#' starts a comment.
class KeyValueFile {
public:
    static KeyValueFile parse(std::istream& is, const std::string& origin = "<stream>") {
        KeyValueFile out;
        std::string line, section;
        int line_no = 0;
        while (std::getline(is, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']') throw ParseError(line_no, "unterminated section header");
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                out.sections_[section];
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value' in " + origin);
            std::string key = trim(trimmed.substr(0, eq));
            std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty()) throw ParseError(line_no, "empty key");
            out.sections_[section][key] = value;
        }
        return out;
    }

    static KeyValueFile parse_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw ValidationError("cannot open: " + path);
        return parse(is, path);
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end() || !s->second.count(key))
            throw ValidationError(qualified(section, key) + ": missing required key");
        return s->second.at(key);
    }

    std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const {
        return has(section, key) ? get(section, key) : fallback;
    }

    long get_int(const std::string& section, const std::string& key) const {
        return to_int(get(section, key), qualified(section, key));
    }

    long get_int_or(const std::string& section, const std::string& key, long fallback) const {
        return has(section, key) ? get_int(section, key) : fallback;
    }

    double get_real(const std::string& section, const std::string& key) const {
        return to_real(get(section, key), qualified(section, key));
    }

    double get_real_or(const std::string& section, const std::string& key, double fallback) const {
        return has(section, key) ? get_real(section, key) : fallback;
    }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }

    static std::string qualified(const std::string& section, const std::string& key) {
        return section.empty() ? key : "[" + section + "] " + key;
    }

    static long to_int(const std::string& v, const std::string& what) {
        std::size_t pos = 0;
        long out = 0;
        try {
            out = std::stol(v, &pos);
        } catch (...) {
            throw ValidationError(what + ": not an integer: '" + v + "'");
        }
        if (pos != v.size()) throw ValidationError(what + ": not an integer: '" + v + "'");
        return out;
    }

    static double to_real(const std::string& v, const std::string& what) {
        std::size_t pos = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &pos);
        } catch (...) {
            throw ValidationError(what + ": not a number: '" + v + "'");
        }
        if (pos != v.size()) throw ValidationError(what + ": not a number: '" + v + "'");
        return out;
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Experiment manifest: [data], [model], [train], [eval] sections plus global
// name/master_seed. Seed streams are derived by purpose tag from the master
// seed, so eval settings never perturb training randomness.
struct ExperimentManifest {
    std::string name = "experiment";
    std::uint64_t master_seed = 1;

    // [data]
    std::string dataset = "triangle-ba";  // triangle-ba | pair-classification | pair-separation
    int train_graphs = 20;
    int test_graphs = 5;
    int n = 100;
    int m_train = 2;
    int m_test = 2;
    std::string pair_family = "wl1-hard-basic";
    int train_pairs = 20;
    int test_pairs = 5;

    // [model]
    ModelConfig model;

    // [train]
    TrainConfig train;
    int num_seeds = 3;
    std::vector<std::string> modes = {"siri"};

    // [eval]
    int invariance_T = 200;
    int invariance_graphs = 5;  // per-set cap for the invariance report
    int invariance_seeds = 3;
    int pair_S = 16;
    double epsilon = 0.0;  // 0 = calibrate

    std::uint64_t seed_for(const std::string& purpose, std::uint64_t index = 0) const {
        return derive_seed(master_seed, purpose, index);
    }

    static ExperimentManifest from_kv(const KeyValueFile& kv) {
        ExperimentManifest m;
        m.name = kv.get_or("", "name", m.name);
        m.master_seed = static_cast<std::uint64_t>(kv.get_int_or("", "master_seed", 1));

        m.dataset = kv.get_or("data", "dataset", m.dataset);
        m.train_graphs = static_cast<int>(kv.get_int_or("data", "train_graphs", m.train_graphs));
        m.test_graphs = static_cast<int>(kv.get_int_or("data", "test_graphs", m.test_graphs));
        m.n = static_cast<int>(kv.get_int_or("data", "n", m.n));
        m.m_train = static_cast<int>(kv.get_int_or("data", "m_train", m.m_train));
        m.m_test = static_cast<int>(kv.get_int_or("data", "m_test", m.m_test));
        m.pair_family = kv.get_or("data", "pair_family", m.pair_family);
        m.train_pairs = static_cast<int>(kv.get_int_or("data", "train_pairs", m.train_pairs));
        m.test_pairs = static_cast<int>(kv.get_int_or("data", "test_pairs", m.test_pairs));

        m.model.layers = static_cast<int>(kv.get_int_or("model", "layers", m.model.layers));
        m.model.hidden_dim = static_cast<int>(kv.get_int_or("model", "hidden_dim", m.model.hidden_dim));
        m.model.rnf_dim = static_cast<int>(kv.get_int_or("model", "rnf_dim", m.model.rnf_dim));
        m.model.input_dim = static_cast<int>(kv.get_int_or("model", "input_dim", m.model.input_dim));
        m.model.out_dim = static_cast<int>(kv.get_int_or("model", "out_dim", m.model.out_dim));
        m.model.readout = readout_from_string(kv.get_or("model", "readout", to_string(m.model.readout)));
        m.model.distribution =
            distribution_from_string(kv.get_or("model", "distribution", to_string(m.model.distribution)));
        m.model.pair_head = kv.get_int_or("model", "pair_head", m.model.pair_head ? 1 : 0) != 0;
        const std::string activation = kv.get_or("model", "activation", "relu");
        if (activation != "relu") throw ValidationError("activation: only 'relu' is supported");

        m.train.mode = train_mode_from_string(kv.get_or("train", "mode", "siri"));
        m.train.k = static_cast<int>(kv.get_int_or("train", "k", m.train.k));
        m.train.epochs = static_cast<int>(kv.get_int_or("train", "epochs", m.train.epochs));
        m.train.lr = kv.get_real_or("train", "lr", m.train.lr);
        m.train.task = task_from_string(kv.get_or("train", "task", to_string(m.train.task)));
        m.train.contrastive_weight = kv.get_real_or("train", "contrastive_weight", m.train.contrastive_weight);
        m.num_seeds = static_cast<int>(kv.get_int_or("train", "seeds", m.num_seeds));
        if (kv.has("train", "modes")) {
            m.modes.clear();
            std::istringstream ms(kv.get("train", "modes"));
            std::string tok;
            while (std::getline(ms, tok, ','))
                m.modes.push_back(tok);
            for (auto& s : m.modes) train_mode_from_string(s);  // validate
        } else {
            m.modes = {to_string(m.train.mode)};
        }

        m.invariance_T = static_cast<int>(kv.get_int_or("eval", "invariance_T", m.invariance_T));
        m.invariance_graphs = static_cast<int>(kv.get_int_or("eval", "invariance_graphs", m.invariance_graphs));
        m.invariance_seeds = static_cast<int>(kv.get_int_or("eval", "invariance_seeds", m.invariance_seeds));
        m.pair_S = static_cast<int>(kv.get_int_or("eval", "pair_S", m.pair_S));
        m.epsilon = kv.get_real_or("eval", "epsilon", m.epsilon);

        if (m.num_seeds < 1) throw ValidationError("seeds: must be >= 1");
        m.model.validate();
        return m;
    }

    static ExperimentManifest from_file(const std::string& path) {
        return from_kv(KeyValueFile::parse_file(path));
    }

    void write(std::ostream& os) const {
        os << "name = " << name << '\n';
        os << "master_seed = " << master_seed << '\n';
        os << "\n[data]\n";
        os << "dataset = " << dataset << '\n';
        if (dataset == "triangle-ba") {
            os << "train_graphs = " << train_graphs << '\n'
               << "test_graphs = " << test_graphs << '\n'
               << "n = " << n << '\n'
               << "m_train = " << m_train << '\n'
               << "m_test = " << m_test << '\n';
        } else {
            os << "pair_family = " << pair_family << '\n'
               << "train_pairs = " << train_pairs << '\n'
               << "test_pairs = " << test_pairs << '\n';
        }
        os << "\n[model]\n";
        write_model_config(model, os);
        os << "\n[train]\n";
        os << "mode = " << to_string(train.mode) << '\n'
           << "k = " << train.k << '\n'
           << "epochs = " << train.epochs << '\n';
        os.precision(17);
        os << "lr = " << train.lr << '\n'
           << "task = " << to_string(train.task) << '\n'
           << "contrastive_weight = " << train.contrastive_weight << '\n'
           << "seeds = " << num_seeds << '\n';
        os << "modes = ";
        for (std::size_t i = 0; i < modes.size(); ++i) os << (i ? "," : "") << modes[i];
        os << '\n';
        os << "\n[eval]\n";
        os << "invariance_T = " << invariance_T << '\n'
           << "invariance_graphs = " << invariance_graphs << '\n'
           << "invariance_seeds = " << invariance_seeds << '\n'
           << "pair_S = " << pair_S << '\n'
           << "epsilon = " << epsilon << '\n';
    }
};

}  // namespace siri
