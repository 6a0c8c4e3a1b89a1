#include "crsn/routing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crsn {

double nhdf(double transmit_weight, double link_delay_s, int common_channels,
            const IntruderFactor& factor) {
    if (link_delay_s == 0.0) {
        throw std::domain_error("nhdf: zero link delay");
    }
    if (link_delay_s < 0.0 || common_channels < 1) {
        throw std::invalid_argument("nhdf: unusable link");
    }
    if (factor.is_infinite()) {
        return 0.0;
    }
    const double ratio = transmit_weight / link_delay_s;
    return std::pow(ratio, static_cast<double>(common_channels)) / factor.value();
}

LinkMetrics make_link_metrics(double transmit_weight, double link_delay_s,
                              int common_channels, const IntruderFactor& factor) {
    LinkMetrics m;
    m.transmit_weight = transmit_weight;
    m.link_delay_s = link_delay_s;
    m.common_channels = common_channels;
    m.intruder_factor = factor;
    m.nhdf = nhdf(transmit_weight, link_delay_s, common_channels, factor);
    return m;
}

double path_score(std::span<const double> link_nhdf) {
    if (link_nhdf.empty()) {
        throw std::invalid_argument("path_score: empty path");
    }
    double total = 0.0;
    for (double v : link_nhdf) {
        if (v == 0.0) {
            return 0.0;  // a convicted or unusable link vetoes the path
        }
        total += v;
    }
    return total;
}

std::optional<RouteEntry> select_route(std::span<const RouteEntry> entries) {
    const RouteEntry* best = nullptr;
    for (const RouteEntry& e : entries) {
        if (!(e.path_score > 0.0)) continue;
        if (best == nullptr) {
            best = &e;
            continue;
        }
        if (e.path_score > best->path_score) {
            best = &e;
        } else if (e.path_score == best->path_score) {
            if (e.path.size() < best->path.size()) {
                best = &e;
            } else if (e.path.size() == best->path.size()) {
                const bool lex_smaller = std::lexicographical_compare(
                    e.path.begin(), e.path.end(), best->path.begin(), best->path.end());
                if (lex_smaller) best = &e;
            }
        }
    }
    if (best == nullptr) {
        return std::nullopt;
    }
    return *best;
}

namespace {

IntruderFactor worst_factor(std::span<const LinkMetrics> links) {
    IntruderFactor worst = IntruderFactor::finite(1.0);
    for (const LinkMetrics& m : links) {
        if (m.intruder_factor.is_infinite()) {
            return IntruderFactor::infinite();
        }
        if (m.intruder_factor.value() > worst.value()) {
            worst = m.intruder_factor;
        }
    }
    return worst;
}

}  // namespace

RouteEntry build_route_entry(const ControlMessage& rrep, std::size_t from_index,
                             Timestamp now) {
    RouteEntry entry;
    entry.destination = rrep.path.back();
    entry.path.assign(rrep.path.begin() + static_cast<std::ptrdiff_t>(from_index),
                      rrep.path.end());
    std::vector<double> values;
    values.reserve(rrep.hop_metrics.size() - from_index);
    for (std::size_t i = from_index; i < rrep.hop_metrics.size(); ++i) {
        values.push_back(rrep.hop_metrics[i].nhdf);
    }
    entry.path_score = path_score(values);
    entry.min_if = worst_factor(
        std::span<const LinkMetrics>(rrep.hop_metrics).subspan(from_index));
    entry.discovered_at = now;
    return entry;
}

RreqResult handle_rreq(ProtocolState& state, const ControlMessage& rreq,
                       const RreqView& view) {
    RreqResult result;
    if (state.already_seen_rreq(rreq.origin, rreq.seq)) {
        result.action = RreqAction::drop_duplicate;
        return result;
    }
    if (std::find(rreq.path.begin(), rreq.path.end(), state.self) != rreq.path.end()) {
        result.action = RreqAction::drop_loop;
        return result;
    }
    if (view.incoming.common_channels < 1 || view.incoming.nhdf == 0.0) {
        // an unusable copy must not shadow a later usable one
        result.action = RreqAction::drop_unusable;
        return result;
    }
    state.seen_rreq.insert({rreq.origin.value, rreq.seq});

    ControlMessage accumulated = rreq;
    accumulated.path.push_back(state.self);
    accumulated.hop_metrics.push_back(view.incoming);

    if (view.is_destination) {
        ControlMessage rrep;
        rrep.kind = MsgKind::rrep;
        rrep.origin = state.self;
        rrep.target = rreq.origin;
        rrep.seq = state.next_seq++;
        rrep.path = accumulated.path;
        rrep.hop_metrics = accumulated.hop_metrics;
        rrep.rrep_index = rrep.path.size() - 1;
        result.replies.push_back(std::move(rrep));
        return result;  // the destination does not rebroadcast
    }

    if (view.destination_is_neighbor && view.final_hop.has_value() &&
        view.final_hop->nhdf > 0.0) {
        ControlMessage rrep;
        rrep.kind = MsgKind::rrep;
        rrep.origin = state.self;
        rrep.target = rreq.origin;
        rrep.seq = state.next_seq++;
        rrep.path = accumulated.path;
        rrep.path.push_back(rreq.target);
        rrep.hop_metrics = accumulated.hop_metrics;
        rrep.hop_metrics.push_back(*view.final_hop);
        rrep.rrep_index = rrep.path.size() - 2;  // walk back from this node
        result.replies.push_back(std::move(rrep));
    }

    // Rebroadcast with this node's own context so downstream receivers can
    // evaluate the next link.
    ControlMessage forward = std::move(accumulated);
    forward.forwarder = state.self;
    forward.sample = view.own_sample;
    forward.sender_free_channels = view.own_free_channels;
    forward.sender_channel = view.own_channel;
    forward.sender_degree = view.own_degree;
    forward.sent_at = view.now;
    result.forward = std::move(forward);
    result.forwarded = true;
    return result;
}

RrepResult handle_rrep(RouteTable& table, const ControlMessage& rrep,
                       const RrepView& view) {
    RrepResult result;
    for (NodeId n : rrep.path) {
        if (view.ledger != nullptr && view.ledger->is_blacklisted(n)) {
            result.action = RrepAction::discarded_blacklisted;
            return result;
        }
    }

    // The request origin installs the full path; intermediate holders cache
    // the downstream sub-path. The path terminus has no downstream links.
    const std::size_t idx = rrep.rrep_index;
    if (idx + 1 < rrep.path.size()) {
        RouteEntry entry = build_route_entry(rrep, idx, view.now);
        if (entry.path_score > 0.0) {
            auto& entries = table[entry.destination];
            std::erase_if(entries, [&](const RouteEntry& e) { return e.path == entry.path; });
            entries.push_back(entry);
            if (idx == 0) {
                result.installed = std::move(entry);
            }
        }
    }

    if (idx == 0) {
        result.action = RrepAction::stored;
        return result;
    }

    ControlMessage forward = rrep;
    forward.rrep_index = idx - 1;
    result.forward = std::move(forward);
    result.action = RrepAction::forwarded;
    return result;
}

}  // namespace crsn
