fn main() {
    std::process::exit(ontobpr::cli::run_from_env());
}
