#include <iostream>
#include "search_class.h"
#include "search_utils.h"

int main() {
    Search engine("docs");
    std::cout << engine.run("alpha") << "\n";
    std::cout << Search("alpha") << "\n";
    return 0;
}
