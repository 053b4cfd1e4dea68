#include "cloudpeer/message.hpp"

namespace cloudpeer {

std::string_view to_string(MessageCategory c)
{
    switch (c) {
    case MessageCategory::index_init:
        return "index_init";
    case MessageCategory::query_routing:
        return "query_routing";
    case MessageCategory::maintenance:
        return "maintenance";
    case MessageCategory::notification:
        return "notification";
    }
    return "unknown";
}

std::optional<MessageCategory> category_from_string(std::string_view s)
{
    for (auto c : kAllCategories)
        if (to_string(c) == s)
            return c;
    return std::nullopt;
}

} // namespace cloudpeer
