#pragma once

namespace calc {

// Calculator evaluates basic arithmetic on integers.
class Calculator {
public:
    Calculator();
    virtual ~Calculator();

    // Returns the sum of a and b.
    int add(int a, int b);
    // Returns the difference a minus b.
    int subtract(int a, int b);
    // Returns the product of a and b.
    int multiply(int a, int b);
    // Describes the calculator flavor.
    virtual const char* flavor() const;

protected:
    int last_result_;
};

// SciCalculator adds scientific helpers on top of Calculator.
class SciCalculator : public Calculator {
public:
    // Integer power with a small nonnegative exponent.
    int power(int base, int exp);
    const char* flavor() const override;
};

}  // namespace calc
