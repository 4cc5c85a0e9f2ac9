fn main() {
    std::process::exit(discrete_maximal::cli::run(std::env::args_os()));
}
