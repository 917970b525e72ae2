#include "fgvc/features.hpp"

#include "fgvc/error.hpp"
#include "fgvc/text.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

namespace fgvc {

void FeatureStore::add(int image_id, Group group, std::vector<double> vector)
{
    if (vector.size() != dim_)
        raise(ErrorKind::DimensionMismatch, "image " + std::to_string(image_id) + " group "
                                                + std::string(name_of(group)) + ": expected " + std::to_string(dim_)
                                                + " values, got " + std::to_string(vector.size()));
    for (const double v : vector)
        if (!std::isfinite(v))
            raise(ErrorKind::InvalidArgument, "non-finite feature component");
    if (!records_.emplace(std::pair{image_id, group}, std::move(vector)).second)
        raise(ErrorKind::DuplicateKey, "image " + std::to_string(image_id) + " group " + std::string(name_of(group)));
}

const std::vector<double>* FeatureStore::find(int image_id, Group group) const
{
    const auto it = records_.find({image_id, group});
    return it == records_.end() ? nullptr : &it->second;
}

bool FeatureStore::has_image(int image_id) const
{
    const auto it = records_.lower_bound({image_id, Group::Original});
    return it != records_.end() && it->first.first == image_id;
}

std::vector<int> FeatureStore::image_ids() const
{
    std::vector<int> ids;
    for (const auto& [key, v] : records_)
        if (ids.empty() || ids.back() != key.first)
            ids.push_back(key.first);
    return ids;
}

FeatureStore parse_feature_store(std::string_view content, const std::string& name, std::size_t expected_dim)
{
    std::optional<FeatureStore> store;
    if (expected_dim != 0)
        store.emplace(expected_dim);
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos)
            end = content.size();
        const std::string_view line = content.substr(start, end - start);
        start = end + 1;
        ++line_no;

        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
        if (tab2 == std::string_view::npos)
            raise_malformed(name, line_no, "expected '<image_id>\\t<group>\\t<values>'");
        const auto id = text::parse_int(line.substr(0, tab1));
        if (!id || *id <= 0)
            raise_malformed(name, line_no, "bad image id");
        const auto group = parse_group(line.substr(tab1 + 1, tab2 - tab1 - 1));
        if (!group)
            raise_malformed(name, line_no, "unknown group '" + std::string(line.substr(tab1 + 1, tab2 - tab1 - 1)) + "'");
        std::vector<double> values;
        for (const auto tok : text::split_fields(line.substr(tab2 + 1))) {
            const auto v = text::parse_double(tok);
            if (!v)
                raise_malformed(name, line_no, "bad feature value '" + std::string(tok) + "'");
            values.push_back(*v);
        }
        if (values.empty())
            raise_malformed(name, line_no, "empty feature vector");
        if (!store)
            store.emplace(values.size());
        try {
            store->add(static_cast<int>(*id), *group, std::move(values));
        } catch (const Error& e) {
            raise(e.kind(), name + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!store)
        store.emplace(expected_dim != 0 ? expected_dim : kDefaultFeatureDim);
    return std::move(*store);
}

FeatureStore load_feature_store(const std::filesystem::path& path, std::size_t expected_dim)
{
    return parse_feature_store(text::read_file(path), path.filename().string(), expected_dim);
}

std::string format_feature_store(const FeatureStore& store)
{
    std::string out;
    for (const int id : store.image_ids()) {
        for (const Group g : kCanonicalGroups) {
            const auto* v = store.find(id, g);
            if (!v)
                continue;
            out += std::to_string(id);
            out += '\t';
            out += name_of(g);
            out += '\t';
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (i)
                    out += ' ';
                out += text::format_shortest((*v)[i]);
            }
            out += '\n';
        }
    }
    return out;
}

CombinationSpec::CombinationSpec(std::initializer_list<Group> groups)
    : CombinationSpec(std::span<const Group>(groups.begin(), groups.size()))
{
}

CombinationSpec::CombinationSpec(std::span<const Group> groups)
{
    for (const Group g : groups) {
        if (mask_.test(index_of(g)))
            raise(ErrorKind::InvalidArgument, "group '" + std::string(name_of(g)) + "' listed twice");
        mask_.set(index_of(g));
    }
}

CombinationSpec CombinationSpec::all()
{
    return CombinationSpec(std::span<const Group>(kCanonicalGroups));
}

CombinationSpec CombinationSpec::parse(std::string_view text)
{
    std::vector<Group> groups;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string_view::npos)
            end = text.size();
        const std::string_view tok = text.substr(start, end - start);
        start = end + 1;
        if (tok == "baseline") {
            groups.push_back(Group::Original);
            groups.push_back(Group::Cropped);
        } else if (tok == "all") {
            groups.insert(groups.end(), kCanonicalGroups.begin(), kCanonicalGroups.end());
        } else if (const auto g = parse_group(tok)) {
            groups.push_back(*g);
        } else {
            raise(ErrorKind::InvalidArgument, "unknown group '" + std::string(tok) + "' in combination spec");
        }
    }
    CombinationSpec spec;
    for (const Group g : groups)
        spec.mask_.set(index_of(g));
    return spec;
}

CombinationSpec CombinationSpec::with(Group group) const
{
    CombinationSpec out = *this;
    out.mask_.set(index_of(group));
    return out;
}

void check_group_order(const GroupOrder& order)
{
    std::bitset<kNumGroups> seen;
    for (const Group g : order)
        seen.set(index_of(g));
    if (!seen.all())
        raise(ErrorKind::InvalidArgument, "group order must list each of the seven groups once");
}

GroupOrder parse_group_order(std::string_view text)
{
    GroupOrder order{};
    std::size_t n = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string_view::npos)
            end = text.size();
        const auto g = parse_group(text.substr(start, end - start));
        if (!g || n == kNumGroups)
            raise(ErrorKind::InvalidArgument, "bad group order '" + std::string(text) + "'");
        order[n++] = *g;
        start = end + 1;
    }
    if (n != kNumGroups)
        raise(ErrorKind::InvalidArgument, "group order must name all seven groups");
    check_group_order(order);
    return order;
}

std::vector<Group> CombinationSpec::groups(const GroupOrder& order) const
{
    std::vector<Group> out;
    for (const Group g : order)
        if (contains(g))
            out.push_back(g);
    return out;
}

std::string CombinationSpec::to_string() const
{
    std::string out;
    for (const Group g : groups()) {
        if (!out.empty())
            out += ',';
        out += name_of(g);
    }
    return out;
}

FusedVector fuse(const FeatureStore& store, int image_id, const CombinationSpec& spec, const GroupOrder& order)
{
    check_group_order(order);
    if (spec.empty())
        raise(ErrorKind::InvalidArgument, "empty combination spec");
    if (!store.has_image(image_id))
        raise(ErrorKind::UnknownImage, "no features for image " + std::to_string(image_id));
    const std::size_t d = store.dim();
    FusedVector out;
    out.image_id = image_id;
    out.values.assign(spec.size() * d, 0.0);
    std::size_t offset = 0;
    for (const Group g : spec.groups(order)) {
        if (const auto* v = store.find(image_id, g)) {
            std::copy(v->begin(), v->end(), out.values.begin() + static_cast<std::ptrdiff_t>(offset));
            out.present.set(index_of(g));
        }
        offset += d;
    }
    return out;
}

std::size_t block_offset(const CombinationSpec& spec, Group group, std::size_t dim, const GroupOrder& order)
{
    if (!spec.contains(group))
        raise(ErrorKind::InvalidArgument, "group not in spec");
    std::size_t block = 0;
    for (const Group g : order) {
        if (g == group)
            break;
        if (spec.contains(g))
            ++block;
    }
    return block * dim;
}

void l2_normalize(std::span<double> values)
{
    double sq = 0.0;
    for (const double v : values)
        sq += v * v;
    if (sq == 0.0)
        return;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& v : values)
        v *= inv;
}

} // namespace fgvc
