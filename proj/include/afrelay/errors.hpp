// SPDX-License-Identifier: Apache-2.0
//
// afrelay: amplify-and-forward space-time coded relay network workbench
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef AFRELAY_ERRORS_HPP
#define AFRELAY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace afrelay
{

// Argument outside the mathematical domain of a function (x <= 0 for K_n, NaN input, ...)
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Invalid configuration value; `field` names the offending entry
class ConfigError : public std::invalid_argument
{
public:
    ConfigError(std::string field, const std::string &what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

// Request is well-formed but outside what the implementation supports
class CapabilityError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Caller broke an interface contract (dimension mismatch, too few points, ...)
class ContractError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

// Adaptive quadrature did not reach the requested tolerance
class ConvergenceError : public std::runtime_error
{
public:
    ConvergenceError(const std::string &what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

} // namespace afrelay

#endif
