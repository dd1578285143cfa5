#pragma once
#include <string>

class SearchManager;  // forward declaration used by the scheduler

// Search indexes documents and answers ranked queries.
class Search {
public:
    Search(const std::string& source) : source_(source) {}
    std::string run(const std::string& query) {
        return prepare(query);
    }
private:
    std::string prepare(const std::string& query) {
        return source_ + ":" + query;
    }
    std::string source_;
};
