#include "lindrec/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace lindrec
{
    namespace
    {
        using boost::multiprecision::cpp_int;

        cpp_int pow10(unsigned n)
        {
            cpp_int r = 1;
            for (unsigned i = 0; i < n; ++i)
            {
                r *= 10;
            }
            return r;
        }

        std::string_view trim(std::string_view s)
        {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            {
                s.remove_prefix(1);
            }
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            {
                s.remove_suffix(1);
            }
            return s;
        }

        Rational parse_decimal(std::string_view s, std::string_view whole)
        {
            if (s.empty())
            {
                throw std::invalid_argument("empty number in '" + std::string(whole) + "'");
            }
            bool negative = false;
            if (s.front() == '+' || s.front() == '-')
            {
                negative = s.front() == '-';
                s.remove_prefix(1);
            }
            cpp_int digits = 0;
            unsigned frac_digits = 0;
            bool seen_point = false;
            bool any_digit = false;
            std::size_t i = 0;
            for (; i < s.size(); ++i)
            {
                const char ch = s[i];
                if (std::isdigit(static_cast<unsigned char>(ch)))
                {
                    digits = digits * 10 + (ch - '0');
                    any_digit = true;
                    if (seen_point)
                    {
                        ++frac_digits;
                    }
                }
                else if (ch == '.' && !seen_point)
                {
                    seen_point = true;
                }
                else
                {
                    break;
                }
            }
            if (!any_digit)
            {
                throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
            }
            long exponent = 0;
            if (i < s.size())
            {
                if (s[i] != 'e' && s[i] != 'E')
                {
                    throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
                }
                std::string exp_text(s.substr(i + 1));
                if (exp_text.empty())
                {
                    throw std::invalid_argument("malformed exponent in '" + std::string(whole) + "'");
                }
                std::size_t used = 0;
                try
                {
                    exponent = std::stol(exp_text, &used);
                }
                catch (const std::exception&)
                {
                    throw std::invalid_argument("malformed exponent in '" + std::string(whole) + "'");
                }
                if (used != exp_text.size() || exponent > 4000 || exponent < -4000)
                {
                    throw std::invalid_argument("malformed exponent in '" + std::string(whole) + "'");
                }
            }
            const long scale = exponent - static_cast<long>(frac_digits);
            Rational q = scale >= 0 ? Rational(digits * pow10(static_cast<unsigned>(scale)))
                                    : Rational(digits, pow10(static_cast<unsigned>(-scale)));
            return negative ? Rational(-q) : q;
        }
    }

    Rational parse_rational(std::string_view text)
    {
        const std::string_view s = trim(text);
        const auto slash = s.find('/');
        if (slash == std::string_view::npos)
        {
            return parse_decimal(s, text);
        }
        const Rational num = parse_decimal(trim(s.substr(0, slash)), text);
        const Rational den = parse_decimal(trim(s.substr(slash + 1)), text);
        if (den == 0)
        {
            throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        }
        return num / den;
    }

    std::string to_fraction_string(const Rational& q)
    {
        return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
    }
}
